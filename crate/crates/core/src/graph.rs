//! Paley and Peisert graph construction plus the structural checks every
//! downstream count relies on.
//!
//! Vertices are the canonical field-element indices `0..q`. Adjacency is a
//! dense bit-packed symmetric matrix: the graphs are half-dense by nature
//! (every degree is `(q-1)/2`) and row intersection is the census hot loop.

use crate::error::{Error, Result};
use crate::field::{CharValue, FieldElement, FieldSpec};
use serde::Serialize;

/// Which of the two constructions a [`Graph`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Paley,
    Peisert,
}

impl GraphKind {
    pub fn label(self) -> &'static str {
        match self {
            GraphKind::Paley => "paley",
            GraphKind::Peisert => "peisert",
        }
    }
}

impl std::str::FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paley" => Ok(GraphKind::Paley),
            "peisert" => Ok(GraphKind::Peisert),
            other => Err(Error::InvalidArgument(format!(
                "unknown graph kind {other:?} (expected paley or peisert)"
            ))),
        }
    }
}

/// Strongly-regular-graph parameters `(v, k, lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl SrgParams {
    /// The parameters both graph kinds must realize at a given `q`:
    /// `(q, (q-1)/2, (q-5)/4, (q-1)/4)`.
    pub fn expected(q: u64) -> Result<Self> {
        if q % 4 != 1 {
            return Err(Error::UnsupportedParameters(format!(
                "q = {q} is not 1 mod 4"
            )));
        }
        Ok(SrgParams {
            v: q,
            k: (q - 1) / 2,
            lambda: (q - 5) / 4,
            mu: (q - 1) / 4,
        })
    }
}

/// Immutable dense symmetric adjacency structure over `q` vertices indexed
/// by canonical field-element order.
#[derive(Debug, Clone)]
pub struct Graph {
    kind: GraphKind,
    field: FieldSpec,
    q: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Builds the Paley graph: `{x, y}` is an edge iff `chi(x - y) = +1`.
    /// Symmetric without special-casing because `-1` is a square when
    /// `q = 1 (mod 4)`.
    pub fn paley(field: &FieldSpec) -> Result<Graph> {
        if field.q() % 4 != 1 {
            return Err(Error::UnsupportedParameters(format!(
                "Paley graph needs q = 1 (mod 4), got q = {}",
                field.q()
            )));
        }
        let conn = paley_connection_set(field);
        Ok(Self::from_connection_set(GraphKind::Paley, field, &conn))
    }

    /// Builds the Peisert graph with the canonical primitive root: `{x, y}`
    /// is an edge iff `x - y = root^j` with `j = 0` or `1 (mod 4)`.
    pub fn peisert(field: &FieldSpec) -> Result<Graph> {
        let root = peisert_check_params(field)?;
        Self::peisert_with_root(field, &root)
    }

    /// Peisert construction with an explicit primitive root; the labeled
    /// graph depends on the root only through its residue class, which the
    /// root-independence tests exercise.
    pub fn peisert_with_root(field: &FieldSpec, root: &FieldElement) -> Result<Graph> {
        peisert_check_params(field)?;
        let table = field.power_class_table(root)?;
        let q = field.q();
        let mut conn = vec![false; q as usize];
        for z in 1..q {
            conn[z as usize] = matches!(table.class_of_index(z), Some(0) | Some(1));
        }
        Ok(Self::from_connection_set(GraphKind::Peisert, field, &conn))
    }

    /// Dense build from a difference set given as a boolean table over
    /// canonical indices. The set must be symmetric under negation, which
    /// both constructions guarantee.
    fn from_connection_set(kind: GraphKind, field: &FieldSpec, conn: &[bool]) -> Graph {
        let q = field.q() as usize;
        let words = q.div_ceil(64);
        let mut rows = vec![0u64; q * words];

        let p = field.p();
        let r = field.r() as usize;
        if r == 1 {
            // Prime field: the difference of indices y > x is y - x directly.
            for x in 0..q {
                for y in (x + 1)..q {
                    if conn[y - x] {
                        rows[x * words + y / 64] |= 1 << (y % 64);
                        rows[y * words + x / 64] |= 1 << (x % 64);
                    }
                }
            }
        } else {
            // Precompute base-p digits of every index once.
            let mut digits = vec![0u64; q * r];
            for idx in 0..q {
                let mut rest = idx as u64;
                for k in 0..r {
                    digits[idx * r + k] = rest % p;
                    rest /= p;
                }
            }
            let mut weights = vec![1u64; r];
            for k in 1..r {
                weights[k] = weights[k - 1] * p;
            }
            for x in 0..q {
                for y in (x + 1)..q {
                    let mut diff = 0u64;
                    for k in 0..r {
                        let dy = digits[y * r + k];
                        let dx = digits[x * r + k];
                        let d = if dy >= dx { dy - dx } else { dy + p - dx };
                        diff += d * weights[k];
                    }
                    if conn[diff as usize] {
                        rows[x * words + y / 64] |= 1 << (y % 64);
                        rows[y * words + x / 64] |= 1 << (x % 64);
                    }
                }
            }
        }
        Graph {
            kind,
            field: field.clone(),
            q,
            words,
            rows,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Number of vertices.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Words per adjacency row.
    pub fn row_words(&self) -> usize {
        self.words
    }

    /// The bit-packed adjacency row of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Neighbors of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        bits_to_vertices(self.row(v))
    }

    pub fn edge_count(&self) -> u64 {
        let total: u64 = self.rows.iter().map(|w| w.count_ones() as u64).sum();
        total / 2
    }

    /// All edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count() as usize);
        for u in 0..self.q {
            for v in bits_to_vertices(self.row(u)) {
                if v > u {
                    out.push((u as u32, v as u32));
                }
            }
        }
        out
    }

    /// `N(x) intersect N(y)`, ascending. Size is `(q-5)/4` on edges and
    /// `(q-1)/4` on non-edges.
    pub fn common_neighborhood(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        if x == y {
            return Err(Error::InvalidArgument(
                "common neighborhood needs two distinct vertices".into(),
            ));
        }
        let joint: Vec<u64> = self
            .row(x)
            .iter()
            .zip(self.row(y))
            .map(|(a, b)| a & b)
            .collect();
        Ok(bits_to_vertices(&joint))
    }

    /// `|N(x) intersect N(y)|` by popcount.
    pub fn common_degree(&self, x: usize, y: usize) -> usize {
        self.row(x)
            .iter()
            .zip(self.row(y))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Checks the full strongly-regular structure: every degree is
    /// `(q-1)/2`, adjacent pairs have `(q-5)/4` common neighbors,
    /// non-adjacent pairs `(q-1)/4`. Together with the degree check this is
    /// exactly the integer matrix identity
    /// `A^2 = k I + lambda A + mu (J - I - A)`,
    /// which pins the spectrum shared by both kinds.
    pub fn verify_srg(&self) -> Result<SrgParams> {
        let params = SrgParams::expected(self.q as u64)?;
        for v in 0..self.q {
            if self.has_edge(v, v) {
                return Err(Error::StructuralFailure(format!("self-loop at {v}")));
            }
            let d = self.degree(v) as u64;
            if d != params.k {
                return Err(Error::StructuralFailure(format!(
                    "vertex {v} has degree {d}, expected {}",
                    params.k
                )));
            }
        }
        for u in 0..self.q {
            for v in (u + 1)..self.q {
                if self.has_edge(u, v) != self.has_edge(v, u) {
                    return Err(Error::StructuralFailure(format!(
                        "adjacency not symmetric at ({u}, {v})"
                    )));
                }
                let common = self.common_degree(u, v) as u64;
                let expected = if self.has_edge(u, v) {
                    params.lambda
                } else {
                    params.mu
                };
                if common != expected {
                    return Err(Error::StructuralFailure(format!(
                        "pair ({u}, {v}) has {common} common neighbors, expected {expected}"
                    )));
                }
            }
        }
        Ok(params)
    }

    /// An explicit vertex permutation carrying edges onto non-edges.
    ///
    /// Candidates are multiplications by a fixed element: the canonically
    /// smallest non-square for Paley, then successive powers of the
    /// canonical primitive root. Every candidate is verified over all pairs
    /// rather than trusted from the algebra.
    pub fn complement_map(&self) -> Result<Vec<usize>> {
        let field = &self.field;
        let mut candidates: Vec<FieldElement> = Vec::new();
        if self.kind == GraphKind::Paley {
            for idx in 1..field.q() {
                let e = field.element_from_index(idx).expect("index < q");
                if field.chi(&e) == CharValue::MinusOne {
                    candidates.push(e);
                    break;
                }
            }
        }
        let root = field.primitive_root();
        let mut pw = root.clone();
        for _ in 0..3 {
            candidates.push(pw.clone());
            pw = field.mul(&pw, &root);
        }

        for cand in candidates {
            let map = self.multiplication_map(&cand);
            if self.verify_complementing(&map) {
                return Ok(map);
            }
        }
        Err(Error::StructuralFailure(
            "no multiplicative candidate complements the graph".into(),
        ))
    }

    /// The permutation `x -> m * x` on canonical indices.
    pub fn multiplication_map(&self, m: &FieldElement) -> Vec<usize> {
        let field = &self.field;
        (0..self.q as u64)
            .map(|idx| {
                let e = field.element_from_index(idx).expect("index < q");
                field.index_of(&field.mul(m, &e)) as usize
            })
            .collect()
    }

    fn verify_complementing(&self, map: &[usize]) -> bool {
        for u in 0..self.q {
            for v in (u + 1)..self.q {
                if self.has_edge(u, v) == self.has_edge(map[u], map[v]) {
                    return false;
                }
            }
        }
        true
    }

    /// True when `map` is a graph isomorphism of `self` onto `other`.
    pub fn is_isomorphism_onto(&self, other: &Graph, map: &[usize]) -> bool {
        if other.q != self.q || map.len() != self.q {
            return false;
        }
        for u in 0..self.q {
            for v in (u + 1)..self.q {
                if self.has_edge(u, v) != other.has_edge(map[u], map[v]) {
                    return false;
                }
            }
        }
        true
    }

    /// Backtracking isomorphism search, offered for `q <= 100` sanity checks
    /// only. Both inputs are assumed vertex-transitive, which lets the
    /// search pin vertex 0 to vertex 0.
    pub fn isomorphism(&self, other: &Graph) -> Result<Option<Vec<usize>>> {
        if self.q > 100 || other.q > 100 {
            return Err(Error::ResourceLimit(
                "isomorphism search is capped at q <= 100".into(),
            ));
        }
        if self.q != other.q || self.edge_count() != other.edge_count() {
            return Ok(None);
        }
        let n = self.q;
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[0] = 0;
        used[0] = true;
        if self.extend_isomorphism(other, &mut map, &mut used, 1) {
            Ok(Some(map))
        } else {
            Ok(None)
        }
    }

    fn extend_isomorphism(
        &self,
        other: &Graph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        depth: usize,
    ) -> bool {
        if depth == self.q {
            return true;
        }
        'cand: for c in 0..self.q {
            if used[c] {
                continue;
            }
            for (prev, &mapped) in map.iter().enumerate().take(depth) {
                if self.has_edge(prev, depth) != other.has_edge(mapped, c) {
                    continue 'cand;
                }
            }
            map[depth] = c;
            used[c] = true;
            if self.extend_isomorphism(other, map, used, depth + 1) {
                return true;
            }
            used[c] = false;
            map[depth] = usize::MAX;
        }
        false
    }

    /// JSON export: `{"q":.., "kind":.., "edges":[[u,v],..]}` with `u < v`
    /// sorted lexicographically.
    pub fn to_edge_json(&self) -> String {
        #[derive(Serialize)]
        struct Export {
            q: u64,
            kind: GraphKind,
            edges: Vec<(u32, u32)>,
        }
        serde_json::to_string(&Export {
            q: self.q as u64,
            kind: self.kind,
            edges: self.edges(),
        })
        .expect("edge list serializes")
    }

    /// DIMACS-like edge format (1-indexed vertices).
    pub fn to_dimacs(&self) -> String {
        let edges = self.edges();
        let mut out = String::new();
        out.push_str(&format!(
            "c {} graph on GF({})\n",
            self.kind.label(),
            self.q
        ));
        out.push_str(&format!("p edge {} {}\n", self.q, edges.len()));
        for (u, v) in edges {
            out.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        out
    }
}

/// Difference set for the Paley construction. Prime fields evaluate `chi`
/// by exponentiation per element; extension fields read the discrete-log
/// table they need for the canonical labeling anyway.
fn paley_connection_set(field: &FieldSpec) -> Vec<bool> {
    let q = field.q();
    let mut conn = vec![false; q as usize];
    if field.r() == 1 {
        for z in 1..q {
            let e = field.element_from_index(z).expect("index < q");
            conn[z as usize] = field.chi(&e) == CharValue::PlusOne;
        }
    } else {
        let table = field
            .power_class_table(&field.primitive_root())
            .expect("canonical root is primitive");
        for z in 1..q {
            conn[z as usize] = table.dlog_of_index(z).expect("nonzero").is_multiple_of(2);
        }
    }
    conn
}

fn peisert_check_params(field: &FieldSpec) -> Result<FieldElement> {
    if field.p() % 4 != 3 || !field.r().is_multiple_of(2) {
        return Err(Error::UnsupportedParameters(format!(
            "Peisert graph needs p = 3 (mod 4) and even r, got p = {}, r = {}",
            field.p(),
            field.r()
        )));
    }
    Ok(field.primitive_root())
}

fn bits_to_vertices(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in words.iter().enumerate() {
        let mut bits = w;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            out.push(wi * 64 + b);
            bits &= bits - 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paley(p: u64, r: u32) -> Graph {
        Graph::paley(&FieldSpec::new(p, r).unwrap()).unwrap()
    }

    fn peisert(p: u64, r: u32) -> Graph {
        Graph::peisert(&FieldSpec::new(p, r).unwrap()).unwrap()
    }

    #[test]
    fn paley_5_is_the_pentagon() {
        // squares mod 5 are {1, 4}
        let g = paley(5, 1);
        for v in 0..5usize {
            assert_eq!(g.neighbors(v), {
                let mut n = vec![(v + 1) % 5, (v + 4) % 5];
                n.sort_unstable();
                n
            });
        }
    }

    #[test]
    fn paley_rejects_bad_congruence() {
        let f = FieldSpec::new(7, 1).unwrap();
        assert!(matches!(
            Graph::paley(&f),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn peisert_rejects_bad_parity() {
        assert!(matches!(
            Graph::peisert(&FieldSpec::new(7, 1).unwrap()),
            Err(Error::UnsupportedParameters(_))
        ));
        assert!(matches!(
            Graph::peisert(&FieldSpec::new(5, 2).unwrap()),
            Err(Error::UnsupportedParameters(_))
        ));
    }

    #[test]
    fn paley_9_has_18_edges() {
        assert_eq!(paley(3, 2).edge_count(), 18);
    }

    #[test]
    fn paley_13_neighbors_of_zero_are_the_residues() {
        let g = paley(13, 1);
        assert_eq!(g.neighbors(0), vec![1, 3, 4, 9, 10, 12]);
    }

    #[test]
    fn peisert_9_is_4_regular() {
        let g = peisert(3, 2);
        for v in 0..9 {
            assert_eq!(g.degree(v), 4);
        }
    }

    #[test]
    fn peisert_49_has_588_edges() {
        assert_eq!(peisert(7, 2).edge_count(), 588);
    }

    #[test]
    fn edge_count_formula_holds() {
        for g in [
            paley(5, 1),
            paley(13, 1),
            paley(3, 2),
            peisert(3, 2),
            peisert(7, 2),
        ] {
            let q = g.q() as u64;
            assert_eq!(g.edge_count(), q * (q - 1) / 4);
        }
    }

    #[test]
    fn verify_srg_examples() {
        assert_eq!(
            paley(13, 1).verify_srg().unwrap(),
            SrgParams {
                v: 13,
                k: 6,
                lambda: 2,
                mu: 3
            }
        );
        assert_eq!(
            paley(29, 1).verify_srg().unwrap(),
            SrgParams {
                v: 29,
                k: 14,
                lambda: 6,
                mu: 7
            }
        );
        assert_eq!(
            peisert(7, 2).verify_srg().unwrap(),
            SrgParams {
                v: 49,
                k: 24,
                lambda: 11,
                mu: 12
            }
        );
    }

    #[test]
    fn paley_and_peisert_share_srg_params() {
        for (p, r) in [(3, 2), (7, 2)] {
            let f = FieldSpec::new(p, r).unwrap();
            let a = Graph::paley(&f).unwrap().verify_srg().unwrap();
            let b = Graph::peisert(&f).unwrap().verify_srg().unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn complement_map_is_multiplication_by_two_at_13() {
        let g = paley(13, 1);
        let map = g.complement_map().unwrap();
        let expected: Vec<usize> = (0..13).map(|x| (2 * x) % 13).collect();
        assert_eq!(map, expected);
    }

    #[test]
    fn complement_map_on_the_pentagon() {
        let g = paley(5, 1);
        let map = g.complement_map().unwrap();
        assert_eq!(map, vec![0, 2, 4, 1, 3]);
        for u in 0..5 {
            for v in (u + 1)..5 {
                assert_ne!(g.has_edge(u, v), g.has_edge(map[u], map[v]));
            }
        }
    }

    #[test]
    fn complement_map_squared_preserves_edges() {
        for g in [paley(13, 1), paley(17, 1), peisert(3, 2), peisert(7, 2)] {
            let map = g.complement_map().unwrap();
            for u in 0..g.q() {
                for v in (u + 1)..g.q() {
                    assert_eq!(g.has_edge(u, v), g.has_edge(map[map[u]], map[map[v]]));
                }
            }
        }
    }

    #[test]
    fn common_neighborhood_sizes() {
        let g13 = paley(13, 1);
        assert_eq!(g13.common_neighborhood(0, 1).unwrap().len(), 2); // edge
        assert_eq!(g13.common_neighborhood(0, 2).unwrap().len(), 3); // non-edge
        let g29 = paley(29, 1);
        assert!(g29.has_edge(0, 1));
        assert_eq!(g29.common_neighborhood(0, 1).unwrap().len(), 6);
        assert!(g13.common_neighborhood(4, 4).is_err());
    }

    #[test]
    fn chi_of_minus_one_is_plus_one_when_admissible() {
        use crate::field::CharValue;
        for (p, r) in [(5, 1), (13, 1), (3, 2), (7, 2), (29, 1)] {
            let f = FieldSpec::new(p, r).unwrap();
            assert_eq!(f.q() % 4, 1);
            let minus_one = f.neg(&f.one());
            assert_eq!(f.chi(&minus_one), CharValue::PlusOne);
        }
    }

    #[test]
    fn peisert_and_paley_are_isomorphic_only_at_9() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let pal = Graph::paley(&f9).unwrap();
        let pei = Graph::peisert(&f9).unwrap();
        let iso = pal.isomorphism(&pei).unwrap();
        let map = iso.expect("the (9,4,1,2) strongly regular graph is unique");
        assert!(pal.is_isomorphism_onto(&pei, &map));

        let f49 = FieldSpec::new(7, 2).unwrap();
        let pal49 = Graph::paley(&f49).unwrap();
        let pei49 = Graph::peisert(&f49).unwrap();
        assert_eq!(pal49.isomorphism(&pei49).unwrap(), None);
    }

    #[test]
    fn isomorphism_is_capped() {
        let g = paley(101, 1);
        assert!(matches!(g.isomorphism(&g), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn peisert_does_not_depend_on_the_root() {
        for (p, r) in [(3, 2), (7, 2)] {
            let f = FieldSpec::new(p, r).unwrap();
            let canonical = Graph::peisert(&f).unwrap();
            let root = f.primitive_root();
            let omega_cubed = f.pow(&root, 3);
            let relabel = canonical.multiplication_map(&omega_cubed);
            let n = f.q() - 1;
            for s in (1..n).step_by(2) {
                if num_integer::gcd(s, n) != 1 {
                    continue;
                }
                let alt_root = f.pow(&root, s);
                let alt = Graph::peisert_with_root(&f, &alt_root).unwrap();
                if s % 4 == 1 {
                    assert_eq!(alt.rows, canonical.rows, "s = {s}, q = {}", f.q());
                } else {
                    // x -> root^3 x carries the canonical labeling onto alt
                    assert!(
                        canonical.is_isomorphism_onto(&alt, &relabel),
                        "s = {s}, q = {}",
                        f.q()
                    );
                }
            }
        }
    }

    #[test]
    fn exports_are_stable() {
        let g = paley(5, 1);
        assert_eq!(
            g.to_edge_json(),
            r#"{"q":5,"kind":"paley","edges":[[0,1],[0,4],[1,2],[2,3],[3,4]]}"#
        );
        assert_eq!(
            g.to_dimacs(),
            "c paley graph on GF(5)\np edge 5 5\ne 1 2\ne 1 5\ne 2 3\ne 3 4\ne 4 5\n"
        );
    }
}
