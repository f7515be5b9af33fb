//! Embedded reference tables: the known k4 values for both graph kinds and
//! the lambda table for the 62 four-vertex design families at q = 29.
//!
//! The tables live as commented CSV under `data/` so the regression suite is
//! self-contained; this module parses them once on first use.

use crate::census::IsoClass4;
use std::sync::OnceLock;

/// One reference row of a k4 table. `label_q` is the row label used in
/// comparison output; `q` is the order of the graph the value belongs to.
/// They differ only for the Paley row labeled 223, which belongs to q = 233.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K4Row {
    pub label_q: u64,
    pub q: u64,
    pub k4: i128,
}

/// One reference row of the q = 29 design-lambda table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignLambdaRow {
    pub lambda: i64,
    pub classes: Vec<IsoClass4>,
}

const PALEY_K4_CSV: &str = include_str!("../data/paley_k4.csv");
const PEISERT_K4_CSV: &str = include_str!("../data/peisert_k4.csv");
const DESIGN_LAMBDA_Q29_CSV: &str = include_str!("../data/design_lambda_q29.csv");

/// The 30 reference (q, k4) rows for Paley graphs, ascending in `q`.
pub fn paley_k4_reference() -> &'static [K4Row] {
    static ROWS: OnceLock<Vec<K4Row>> = OnceLock::new();
    ROWS.get_or_init(|| parse_k4_rows(PALEY_K4_CSV))
}

/// The 15 reference (q, k4) rows for Peisert graphs, ascending in `q`.
pub fn peisert_k4_reference() -> &'static [K4Row] {
    static ROWS: OnceLock<Vec<K4Row>> = OnceLock::new();
    ROWS.get_or_init(|| parse_k4_rows(PEISERT_K4_CSV))
}

/// The 62 reference lambda rows at q = 29, in table order.
pub fn design_lambda_reference_q29() -> &'static [DesignLambdaRow] {
    static ROWS: OnceLock<Vec<DesignLambdaRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        data_lines(DESIGN_LAMBDA_Q29_CSV)
            .map(|line| {
                let (lambda, classes) = line
                    .split_once(',')
                    .unwrap_or_else(|| panic!("malformed lambda row {line:?}"));
                DesignLambdaRow {
                    lambda: lambda.parse().expect("lambda parses"),
                    classes: classes
                        .split('+')
                        .map(|s| IsoClass4::from_label(s).expect("class label parses"))
                        .collect(),
                }
            })
            .collect()
    })
}

/// Reference lambda for a family at q = 29, matched as a set of tilde
/// classes.
pub fn design_lambda_q29(classes: &[IsoClass4]) -> Option<i64> {
    let mask = family_mask(classes)?;
    design_lambda_reference_q29()
        .iter()
        .find(|row| family_mask(&row.classes) == Some(mask))
        .map(|row| row.lambda)
}

fn family_mask(classes: &[IsoClass4]) -> Option<u8> {
    let mut mask = 0u8;
    for &class in classes {
        let slot = IsoClass4::TILDE_REPRESENTATIVES
            .iter()
            .position(|&c| c == class)?;
        mask |= 1 << slot;
    }
    Some(mask)
}

fn parse_k4_rows(csv: &str) -> Vec<K4Row> {
    data_lines(csv)
        .map(|line| {
            let mut parts = line.split(',');
            let mut next = || parts.next().unwrap_or_else(|| panic!("short row {line:?}"));
            K4Row {
                label_q: next().parse().expect("label_q parses"),
                q: next().parse().expect("q parses"),
                k4: next().parse().expect("k4 parses"),
            }
        })
        .collect()
}

fn data_lines(csv: &str) -> impl Iterator<Item = &str> {
    csv.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .skip(1) // header
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paley_table_shape() {
        let rows = paley_k4_reference();
        assert_eq!(rows.len(), 30);
        assert_eq!(
            rows[0],
            K4Row {
                label_q: 5,
                q: 5,
                k4: 0
            }
        );
        assert_eq!(
            rows[29],
            K4Row {
                label_q: 281,
                q: 281,
                k4: 3737300
            }
        );
        // the relabeled row
        let odd = rows.iter().find(|r| r.label_q != r.q).unwrap();
        assert_eq!((odd.label_q, odd.q, odd.k4), (223, 233, 1756820));
        // every built q is admissible
        assert!(rows.iter().all(|r| r.q % 4 == 1));
    }

    #[test]
    fn peisert_table_shape() {
        let rows = peisert_k4_reference();
        assert_eq!(rows.len(), 15);
        assert_eq!(
            rows[1],
            K4Row {
                label_q: 49,
                q: 49,
                k4: 2156
            }
        );
        assert_eq!(rows[14].k4, 984209819060);
        assert!(rows.windows(2).all(|w| w[0].q < w[1].q));
    }

    #[test]
    fn design_lambda_table_shape() {
        let rows = design_lambda_reference_q29();
        assert_eq!(rows.len(), 62);
        assert_eq!(design_lambda_q29(&[IsoClass4::K4]), Some(6));
        assert_eq!(design_lambda_q29(&[IsoClass4::C4]), Some(90));
        // lookup is order-insensitive
        assert_eq!(
            design_lambda_q29(&[IsoClass4::Diamond, IsoClass4::K4]),
            Some(60)
        );
        assert_eq!(design_lambda_q29(&[IsoClass4::E4]), None);
        // the printed table is additive over its own singletons
        let single = |c: IsoClass4| design_lambda_q29(&[c]).unwrap();
        for row in rows {
            let sum: i64 = row.classes.iter().map(|&c| single(c)).sum();
            assert_eq!(row.lambda, sum);
        }
    }
}
