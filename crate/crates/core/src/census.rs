//! Exact censuses of 4-vertex induced subgraphs: brute force at small `q`,
//! closed forms driven by the clique count `k4` at large `q`, and the
//! counting identities that tie the two together.
//!
//! All counting paths use 128-bit integers; there is no floating point
//! anywhere in here.

use crate::error::{Error, Result};
use crate::graph::Graph;
use num_integer::binomial;
use rayon::prelude::*;
use serde::Serialize;

/// Default cap on `q` for the brute-force census (about 6.5e7 subsets).
pub const DEFAULT_BRUTE_CAP: u64 = 200;

/// The eleven isomorphism classes of graphs on four vertices, in the fixed
/// order used by every table and export.
///
/// Padding with isolated vertices is implicit: `K2` is a single edge plus
/// two isolated vertices, `P3` a 3-path plus one isolated vertex, `K3` a
/// triangle plus one isolated vertex. `Paw` is a triangle with a pendant
/// edge, `Diamond` is `K4` minus an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IsoClass4 {
    E4,
    K2,
    P3,
    TwoK2,
    K3,
    P4,
    K13,
    C4,
    Paw,
    Diamond,
    K4,
}

impl IsoClass4 {
    pub const ALL: [IsoClass4; 11] = [
        IsoClass4::E4,
        IsoClass4::K2,
        IsoClass4::P3,
        IsoClass4::TwoK2,
        IsoClass4::K3,
        IsoClass4::P4,
        IsoClass4::K13,
        IsoClass4::C4,
        IsoClass4::Paw,
        IsoClass4::Diamond,
        IsoClass4::K4,
    ];

    /// The six classes that represent the distinct tilde classes, in table
    /// order.
    pub const TILDE_REPRESENTATIVES: [IsoClass4; 6] = [
        IsoClass4::K4,
        IsoClass4::Diamond,
        IsoClass4::Paw,
        IsoClass4::C4,
        IsoClass4::K13,
        IsoClass4::P4,
    ];

    /// Position in the fixed class order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Table label.
    pub fn label(self) -> &'static str {
        match self {
            IsoClass4::E4 => "E4",
            IsoClass4::K2 => "K2+2I",
            IsoClass4::P3 => "P3+I",
            IsoClass4::TwoK2 => "2K2",
            IsoClass4::K3 => "K3+I",
            IsoClass4::P4 => "P4",
            IsoClass4::K13 => "K13",
            IsoClass4::C4 => "C4",
            IsoClass4::Paw => "R",
            IsoClass4::Diamond => "D",
            IsoClass4::K4 => "K4",
        }
    }

    /// Parses either the table label or the enum-style name. The short
    /// names `R` and `D` are the paw and diamond.
    pub fn from_label(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let class = match t.as_str() {
            "E4" => IsoClass4::E4,
            "K2+2I" | "K2" => IsoClass4::K2,
            "P3+I" | "P3" => IsoClass4::P3,
            "2K2" => IsoClass4::TwoK2,
            "K3+I" | "K3" => IsoClass4::K3,
            "P4" => IsoClass4::P4,
            "K13" | "K1,3" | "K_{1,3}" => IsoClass4::K13,
            "C4" => IsoClass4::C4,
            "R" | "PAW" => IsoClass4::Paw,
            "D" | "DIAMOND" => IsoClass4::Diamond,
            "K4" => IsoClass4::K4,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown 4-vertex class {s:?}"
                )))
            }
        };
        Ok(class)
    }

    /// Number of edges in the class.
    pub fn edge_count(self) -> u32 {
        match self {
            IsoClass4::E4 => 0,
            IsoClass4::K2 => 1,
            IsoClass4::P3 | IsoClass4::TwoK2 => 2,
            IsoClass4::K3 | IsoClass4::P4 | IsoClass4::K13 => 3,
            IsoClass4::C4 | IsoClass4::Paw => 4,
            IsoClass4::Diamond => 5,
            IsoClass4::K4 => 6,
        }
    }

    /// The complement class; `P4` is self-paired.
    pub fn complement(self) -> IsoClass4 {
        match self {
            IsoClass4::E4 => IsoClass4::K4,
            IsoClass4::K4 => IsoClass4::E4,
            IsoClass4::K2 => IsoClass4::Diamond,
            IsoClass4::Diamond => IsoClass4::K2,
            IsoClass4::P3 => IsoClass4::Paw,
            IsoClass4::Paw => IsoClass4::P3,
            IsoClass4::TwoK2 => IsoClass4::C4,
            IsoClass4::C4 => IsoClass4::TwoK2,
            IsoClass4::K3 => IsoClass4::K13,
            IsoClass4::K13 => IsoClass4::K3,
            IsoClass4::P4 => IsoClass4::P4,
        }
    }

    pub fn is_self_complementary(self) -> bool {
        self == IsoClass4::P4
    }
}

/// Classification of all 64 edge-bit patterns on 4 labeled vertices by
/// (edge count, sorted degree sequence), which separates the 11 classes.
/// Bit layout for a sorted 4-set (a, b, c, d):
/// bit 0 = ab, 1 = ac, 2 = ad, 3 = bc, 4 = bd, 5 = cd.
const CLASS_LUT: [IsoClass4; 64] = build_class_lut();

const fn build_class_lut() -> [IsoClass4; 64] {
    let mut lut = [IsoClass4::E4; 64];
    let mut bits = 0usize;
    while bits < 64 {
        lut[bits] = classify_bits(bits as u8);
        bits += 1;
    }
    lut
}

const fn classify_bits(bits: u8) -> IsoClass4 {
    let e = bits.count_ones();
    let mut deg = [
        (bits & 1) + (bits >> 1 & 1) + (bits >> 2 & 1),
        (bits & 1) + (bits >> 3 & 1) + (bits >> 4 & 1),
        (bits >> 1 & 1) + (bits >> 3 & 1) + (bits >> 5 & 1),
        (bits >> 2 & 1) + (bits >> 4 & 1) + (bits >> 5 & 1),
    ];
    // sort the four degrees ascending (fixed swap network)
    let mut i = 0;
    while i < 4 {
        let mut j = i + 1;
        while j < 4 {
            if deg[j] < deg[i] {
                let t = deg[i];
                deg[i] = deg[j];
                deg[j] = t;
            }
            j += 1;
        }
        i += 1;
    }
    match (e, deg) {
        (0, _) => IsoClass4::E4,
        (1, _) => IsoClass4::K2,
        (2, [0, 1, 1, 2]) => IsoClass4::P3,
        (2, _) => IsoClass4::TwoK2,
        (3, [0, 2, 2, 2]) => IsoClass4::K3,
        (3, [1, 1, 2, 2]) => IsoClass4::P4,
        (3, _) => IsoClass4::K13,
        (4, [2, 2, 2, 2]) => IsoClass4::C4,
        (4, _) => IsoClass4::Paw,
        (5, _) => IsoClass4::Diamond,
        _ => IsoClass4::K4,
    }
}

/// Exact counts of all 11 four-vertex induced-subgraph classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census4 {
    counts: [i128; 11],
}

impl Census4 {
    pub fn from_counts(counts: [i128; 11]) -> Census4 {
        Census4 { counts }
    }

    pub fn get(&self, class: IsoClass4) -> i128 {
        self.counts[class.index()]
    }

    /// `(class, count)` pairs in the fixed class order.
    pub fn iter(&self) -> impl Iterator<Item = (IsoClass4, i128)> + '_ {
        IsoClass4::ALL.iter().map(|&c| (c, self.counts[c.index()]))
    }

    pub fn total(&self) -> i128 {
        self.counts.iter().sum()
    }

    pub fn k4(&self) -> i128 {
        self.get(IsoClass4::K4)
    }

    /// Checks that counts sum to `C(q, 4)` and that complement classes have
    /// equal counts.
    pub fn validate(&self, q: u64) -> Result<()> {
        let expected = binomial(q as i128, 4);
        if self.total() != expected {
            return Err(Error::StructuralFailure(format!(
                "census totals {} instead of C({q},4) = {expected}",
                self.total()
            )));
        }
        for class in IsoClass4::ALL {
            if self.get(class) != self.get(class.complement()) {
                return Err(Error::StructuralFailure(format!(
                    "complement symmetry broken between {} and {}",
                    class.label(),
                    class.complement().label()
                )));
            }
        }
        Ok(())
    }
}

/// Sizes of the six tilde classes `|H~| = |H| + |complement(H)|` (with the
/// self-complementary `P4` counted once).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TildeCounts {
    pub k4: i128,
    pub diamond: i128,
    pub paw: i128,
    pub c4: i128,
    pub k13: i128,
    pub p4: i128,
}

impl TildeCounts {
    pub fn get(&self, class: IsoClass4) -> i128 {
        match class {
            IsoClass4::K4 | IsoClass4::E4 => self.k4,
            IsoClass4::Diamond | IsoClass4::K2 => self.diamond,
            IsoClass4::Paw | IsoClass4::P3 => self.paw,
            IsoClass4::C4 | IsoClass4::TwoK2 => self.c4,
            IsoClass4::K13 | IsoClass4::K3 => self.k13,
            IsoClass4::P4 => self.p4,
        }
    }

    /// Tilde sizes read off a census: `2|H|` for the five complement pairs,
    /// `|P4|` alone for the self-complementary class.
    pub fn from_census(c: &Census4) -> TildeCounts {
        TildeCounts {
            k4: c.get(IsoClass4::K4) + c.get(IsoClass4::E4),
            diamond: c.get(IsoClass4::Diamond) + c.get(IsoClass4::K2),
            paw: c.get(IsoClass4::Paw) + c.get(IsoClass4::P3),
            c4: c.get(IsoClass4::C4) + c.get(IsoClass4::TwoK2),
            k13: c.get(IsoClass4::K13) + c.get(IsoClass4::K3),
            p4: c.get(IsoClass4::P4),
        }
    }

    /// Closed forms for the six tilde sizes in terms of `q` and `k4`:
    ///
    /// ```text
    /// |K4~|  = 2 k4
    /// |D~|   = q(q-1)(q-5)(q-9)/64 - 12 k4
    /// |R~|   = q(q-1)(q-5)/4      + 24 k4
    /// |C4~|  = q(q-1)(q-5)/16     +  6 k4
    /// |K13~| = q(q-1)(q-5)(q-9)/96 -  8 k4
    /// |P4~|  = q(q-1)(q^2-10q+41)/64 - 12 k4
    /// ```
    ///
    /// Every division must be exact and every size non-negative.
    pub fn from_k4(q: u64, k4: i128) -> Result<TildeCounts> {
        if q % 4 != 1 {
            return Err(Error::InvalidParameters(format!("q = {q} is not 1 mod 4")));
        }
        if k4 < 0 {
            return Err(Error::InvalidParameters("k4 must be non-negative".into()));
        }
        let q = q as i128;
        let base = q * (q - 1) * (q - 5);
        let deep = base * (q - 9);
        let p4_poly = q * (q - 1) * (q * q - 10 * q + 41);
        let tilde = TildeCounts {
            k4: 2 * k4,
            diamond: exact_div(deep, 64)? - 12 * k4,
            paw: exact_div(base, 4)? + 24 * k4,
            c4: exact_div(base, 16)? + 6 * k4,
            k13: exact_div(deep, 96)? - 8 * k4,
            p4: exact_div(p4_poly, 64)? - 12 * k4,
        };
        for class in IsoClass4::TILDE_REPRESENTATIVES {
            if tilde.get(class) < 0 {
                return Err(Error::InvalidParameters(format!(
                    "negative tilde count for {} (k4 = {k4} is too large for q = {q})",
                    class.label()
                )));
            }
        }
        Ok(tilde)
    }
}

fn exact_div(n: i128, d: i128) -> Result<i128> {
    if n % d != 0 {
        return Err(Error::InvalidParameters(format!(
            "{n} is not divisible by {d}"
        )));
    }
    Ok(n / d)
}

/// Classifies the induced subgraph on four distinct vertices.
pub fn classify_4set(g: &Graph, set: [usize; 4]) -> Result<IsoClass4> {
    let [a, b, c, d] = set;
    if a == b || a == c || a == d || b == c || b == d || c == d {
        return Err(Error::InvalidArgument(
            "classification needs four distinct vertices".into(),
        ));
    }
    let bits = (g.has_edge(a, b) as usize)
        | (g.has_edge(a, c) as usize) << 1
        | (g.has_edge(a, d) as usize) << 2
        | (g.has_edge(b, c) as usize) << 3
        | (g.has_edge(b, d) as usize) << 4
        | (g.has_edge(c, d) as usize) << 5;
    Ok(CLASS_LUT[bits])
}

/// Classifies every 4-subset of the vertex set with the default cap.
pub fn brute_census(g: &Graph) -> Result<Census4> {
    brute_census_with_cap(g, DEFAULT_BRUTE_CAP)
}

/// Brute-force census with an explicit cap on `q`.
///
/// The enumeration fixes a sorted triple `(a, b, c)` and bit-slices over the
/// remaining vertices `d > c`: the eight popcounts of
/// `(+-row_a) & (+-row_b) & (+-row_c)` give the number of `d` in each
/// adjacency cell, and the triple's own three edge bits select which class
/// each cell lands in. Work is partitioned over `a` across threads; counts
/// are exact integers, so the result is identical for any thread count.
pub fn brute_census_with_cap(g: &Graph, cap: u64) -> Result<Census4> {
    let q = g.q();
    if q as u64 > cap {
        return Err(Error::ResourceLimit(format!(
            "brute census capped at q <= {cap} (got q = {q}); use census_from_k4 instead"
        )));
    }
    let words = g.row_words();
    let counts = (0..q)
        .into_par_iter()
        .map(|a| {
            let mut local = [0i128; 11];
            let ra = g.row(a);
            for b in (a + 1)..q {
                let eab = g.has_edge(a, b) as usize;
                let rb = g.row(b);
                for c in (b + 1)..q {
                    let base =
                        eab | (g.has_edge(a, c) as usize) << 1 | (g.has_edge(b, c) as usize) << 3;
                    let rc = g.row(c);
                    // Cells are indexed by (ad, bd, cd) bits.
                    let mut cell_counts = [0u32; 8];
                    let wstart = (c + 1) / 64;
                    for wi in wstart..words {
                        let mut valid = !0u64;
                        let lo = wi * 64;
                        if lo <= c {
                            valid &= !0u64 << (c + 1 - lo);
                        }
                        if lo + 64 > q {
                            valid &= (1u64 << (q - lo)) - 1;
                        }
                        if valid == 0 {
                            continue;
                        }
                        let wa = ra[wi];
                        let wb = rb[wi];
                        let wc = rc[wi];
                        for (cell, count) in cell_counts.iter_mut().enumerate() {
                            let sa = if cell & 1 != 0 { wa } else { !wa };
                            let sb = if cell & 2 != 0 { wb } else { !wb };
                            let sc = if cell & 4 != 0 { wc } else { !wc };
                            *count += (sa & sb & sc & valid).count_ones();
                        }
                    }
                    for (cell, &n) in cell_counts.iter().enumerate() {
                        if n == 0 {
                            continue;
                        }
                        let bits = base | (cell & 1) << 2 | (cell & 2) << 3 | (cell & 4) << 3;
                        local[CLASS_LUT[bits].index()] += n as i128;
                    }
                }
            }
            local
        })
        .reduce(
            || [0i128; 11],
            |mut acc, local| {
                for (a, l) in acc.iter_mut().zip(local) {
                    *a += l;
                }
                acc
            },
        );
    let census = Census4 { counts };
    census.validate(q as u64)?;
    Ok(census)
}

/// `k4` from the canonical edge (vertex 0 and its smallest neighbor):
/// `k4 = q (q-1) m / 24` where `m` is the number of edges inside the
/// common neighborhood of the edge. Edge-transitivity makes the edge choice
/// irrelevant, which the property tests enforce.
pub fn k4_fast(g: &Graph) -> Result<i128> {
    let y0 = *g
        .neighbors(0)
        .first()
        .ok_or_else(|| Error::StructuralFailure("vertex 0 has no neighbors".into()))?;
    k4_via_edge(g, 0, y0)
}

/// Same computation through an explicit edge.
pub fn k4_via_edge(g: &Graph, x: usize, y: usize) -> Result<i128> {
    if !g.has_edge(x, y) {
        return Err(Error::InvalidArgument(format!("({x}, {y}) is not an edge")));
    }
    let cn = g.common_neighborhood(x, y)?;
    let words = g.row_words();
    let mut mask = vec![0u64; words];
    for &v in &cn {
        mask[v / 64] |= 1 << (v % 64);
    }
    let mut doubled: u64 = 0;
    for &v in &cn {
        doubled += g
            .row(v)
            .iter()
            .zip(&mask)
            .map(|(w, m)| (w & m).count_ones() as u64)
            .sum::<u64>();
    }
    let m = (doubled / 2) as i128;
    let q = g.q() as i128;
    let num = q * (q - 1) * m;
    if num % 24 != 0 {
        return Err(Error::StructuralFailure(format!(
            "q(q-1)m = {num} is not divisible by 24; the input is not edge-transitive"
        )));
    }
    Ok(num / 24)
}

/// Evaluates the six closed forms for the tilde sizes, halves the
/// non-self-complementary ones, and fills complement classes symmetrically.
pub fn census_from_k4(q: u64, k4: i128) -> Result<Census4> {
    let tilde = TildeCounts::from_k4(q, k4)?;
    let mut counts = [0i128; 11];
    for class in IsoClass4::TILDE_REPRESENTATIVES {
        let t = tilde.get(class);
        let per_class = if class.is_self_complementary() {
            t
        } else {
            match exact_div(t, 2) {
                Ok(v) => v,
                Err(_) => {
                    return Err(Error::InvalidParameters(format!(
                        "tilde count {t} for {} is odd",
                        class.label()
                    )))
                }
            }
        };
        counts[class.index()] = per_class;
        counts[class.complement().index()] = per_class;
    }
    let census = Census4 { counts };
    let expected = binomial(q as i128, 4);
    if census.total() != expected {
        return Err(Error::InvalidParameters(format!(
            "class counts total {} instead of C({q},4) = {expected}",
            census.total()
        )));
    }
    Ok(census)
}

/// Directly counted triangle and induced-3-path totals, each checked
/// against its closed form `q(q-1)(q-5)/48` resp. `q(q-1)^2/16`.
pub fn triangle_counts(g: &Graph) -> Result<(i128, i128)> {
    let q = g.q();
    let mut triple_sum: i128 = 0; // sum over edges of |N(x) /\ N(y)|
    let mut wedge_sum: i128 = 0; // sum over vertices of C(deg, 2)
    for u in 0..q {
        let d = g.degree(u) as i128;
        wedge_sum += d * (d - 1) / 2;
        for v in g.neighbors(u) {
            if v > u {
                triple_sum += g.common_degree(u, v) as i128;
            }
        }
    }
    if triple_sum % 3 != 0 {
        return Err(Error::StructuralFailure(
            "triangle triple sum not divisible by 3".into(),
        ));
    }
    let k3 = triple_sum / 3;
    let p3 = wedge_sum - 3 * k3;
    let qi = q as i128;
    let k3_closed = exact_div(qi * (qi - 1) * (qi - 5), 48)
        .map_err(|_| Error::StructuralFailure("q(q-1)(q-5)/48 is not an integer".into()))?;
    let p3_closed = exact_div(qi * (qi - 1) * (qi - 1), 16)
        .map_err(|_| Error::StructuralFailure("q(q-1)^2/16 is not an integer".into()))?;
    if k3 != k3_closed {
        return Err(Error::StructuralFailure(format!(
            "triangle count {k3} does not match closed form {k3_closed}"
        )));
    }
    if p3 != p3_closed {
        return Err(Error::StructuralFailure(format!(
            "3-path count {p3} does not match closed form {p3_closed}"
        )));
    }
    Ok((k3, p3))
}

/// One linear relation between class counts, evaluated exactly.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub lhs: i128,
    pub rhs: i128,
}

impl RelationCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Pass/fail report for the five linear relations.
#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub q: u64,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(RelationCheck::holds)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.holds())
            .map(|c| c.name)
            .collect()
    }
}

/// Evaluates the five exact linear relations between the class counts:
///
/// ```text
/// (a) 4|D| + 2|R|   = q(q-1)^2 (q-5) / 32
/// (b) 2|R| + 2|P4|  = q(q-1)^3 / 32
/// (c) 6 k4 + |D|    = q(q-1)(q-5)(q-9) / 128
/// (d) |D| + 2|C4|   = q(q-1)^2 (q-5) / 128
/// (e) 3|K13| + |R|  = q(q-1)^2 (q-5) / 64
/// ```
///
/// Failures are report entries, not errors.
pub fn check_linear_relations(q: u64, census: &Census4) -> RelationReport {
    let qi = q as i128;
    let d = census.get(IsoClass4::Diamond);
    let r = census.get(IsoClass4::Paw);
    let p4 = census.get(IsoClass4::P4);
    let c4 = census.get(IsoClass4::C4);
    let k13 = census.get(IsoClass4::K13);
    let k4 = census.get(IsoClass4::K4);
    let qm1 = qi - 1;
    let checks = vec![
        RelationCheck {
            name: "a",
            statement: "4|D| + 2|R| = q(q-1)^2(q-5)/32",
            lhs: 4 * d + 2 * r,
            rhs: qi * qm1 * qm1 * (qi - 5) / 32,
        },
        RelationCheck {
            name: "b",
            statement: "2|R| + 2|P4| = q(q-1)^3/32",
            lhs: 2 * r + 2 * p4,
            rhs: qi * qm1 * qm1 * qm1 / 32,
        },
        RelationCheck {
            name: "c",
            statement: "6k4 + |D| = q(q-1)(q-5)(q-9)/128",
            lhs: 6 * k4 + d,
            rhs: qi * qm1 * (qi - 5) * (qi - 9) / 128,
        },
        RelationCheck {
            name: "d",
            statement: "|D| + 2|C4| = q(q-1)^2(q-5)/128",
            lhs: d + 2 * c4,
            rhs: qi * qm1 * qm1 * (qi - 5) / 128,
        },
        RelationCheck {
            name: "e",
            statement: "3|K13| + |R| = q(q-1)^2(q-5)/64",
            lhs: 3 * k13 + r,
            rhs: qi * qm1 * qm1 * (qi - 5) / 64,
        },
    ];
    RelationReport { q, checks }
}

/// Counts members of `class` containing both endpoints of an edge; the
/// edge-transitivity identity `|E(H)| |H(G)| = |E| |H(G, {x,y})|` is exactly
/// what the property tests check against this count.
pub fn count_through_pair(g: &Graph, class: IsoClass4, x: usize, y: usize) -> Result<i128> {
    if class.edge_count() == 0 {
        return Err(Error::InvalidArgument(
            "the through-pair identity needs a class with at least one edge".into(),
        ));
    }
    if x == y || !g.has_edge(x, y) {
        return Err(Error::InvalidArgument(format!(
            "({x}, {y}) must be an edge"
        )));
    }
    let q = g.q();
    let mut count = 0i128;
    for z in 0..q {
        if z == x || z == y {
            continue;
        }
        for w in (z + 1)..q {
            if w == x || w == y {
                continue;
            }
            if classify_4set(g, [x, y, z, w])? == class {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// For every triangle, the number of vertices completing it to a 4-clique.
/// The multiset is constant for small `q` but not in general; the first
/// non-constant case is q = 37, kept as a regression check.
pub fn k4_extensions_per_triangle(g: &Graph) -> Vec<usize> {
    let q = g.q();
    let mut out = Vec::new();
    for a in 0..q {
        for b in (a + 1)..q {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in (b + 1)..q {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    let ext = g
                        .row(a)
                        .iter()
                        .zip(g.row(b))
                        .zip(g.row(c))
                        .map(|((x, y), z)| (x & y & z).count_ones() as usize)
                        .sum();
                    out.push(ext);
                }
            }
        }
    }
    out
}

/// One row of the census table exports.
#[derive(Debug, Clone, Serialize)]
pub struct CensusRow {
    pub q: u64,
    pub kind: &'static str,
    pub class: &'static str,
    pub count: u64,
}

/// Flattens a census into `(q, kind, class, count)` rows in the fixed
/// class order.
pub fn census_rows(q: u64, kind: &'static str, census: &Census4) -> Result<Vec<CensusRow>> {
    census
        .iter()
        .map(|(class, count)| {
            let count = u64::try_from(count).map_err(|_| {
                Error::InvalidParameters(format!(
                    "count {count} for {} does not fit an exported integer",
                    class.label()
                ))
            })?;
            Ok(CensusRow {
                q,
                kind,
                class: class.label(),
                count,
            })
        })
        .collect()
}

/// CSV rendering with exact decimal integers.
pub fn census_to_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("q,kind,class,count\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.q, row.kind, row.class, row.count
        ));
    }
    out
}

pub fn census_to_json(rows: &[CensusRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}
