//! Block designs harvested from the subgraph structure of the graph.
//!
//! A block family names one representative per tilde class to include; the
//! block set is every k-subset whose induced subgraph is isomorphic to a
//! representative or its complement. Lambda is always re-derived by
//! exhaustive pair incidence and never trusted from a formula: the embedded
//! reference table has rows that disagree with the closed forms, and the
//! empirical count is the ground truth this crate reports.

use crate::census::{classify_4set, k4_fast, IsoClass4, TildeCounts};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::reference;
use num_integer::binomial;
use serde::Serialize;

/// Default cap on the block size for full k-subset enumeration.
pub const DEFAULT_K_CAP: u32 = 5;

/// Default cap on `q` for materializing all 62 four-vertex families.
pub const DEFAULT_APPENDIX_Q_CAP: u64 = 61;

/// A graph on at most 8 vertices stored as edge bits, used for block-family
/// representatives and brute-force isomorphism testing.
///
/// Edge bits use the row-major upper-triangle order `(0,1), (0,2), ...,
/// (n-2, n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallGraph {
    n: u8,
    bits: u32,
}

impl SmallGraph {
    pub const MAX_VERTICES: u8 = 8;

    pub fn new(n: u8, bits: u32) -> Result<SmallGraph> {
        if n == 0 || n > Self::MAX_VERTICES {
            return Err(Error::InvalidArgument(format!(
                "small graphs support 1..={} vertices, got {n}",
                Self::MAX_VERTICES
            )));
        }
        let max_bits = 1u32 << (n as u32 * (n as u32 - 1) / 2);
        if bits >= max_bits {
            return Err(Error::InvalidArgument(format!(
                "edge bits {bits:#b} out of range for {n} vertices"
            )));
        }
        Ok(SmallGraph { n, bits })
    }

    pub fn from_edges(n: u8, edges: &[(u8, u8)]) -> Result<SmallGraph> {
        let mut g = SmallGraph::new(n, 0)?;
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) invalid on {n} vertices"
                )));
            }
            g.bits |= 1 << pair_rank(u.min(v) as u64, u.max(v) as u64, n as u64);
        }
        Ok(g)
    }

    pub fn empty(n: u8) -> SmallGraph {
        SmallGraph::new(n, 0).expect("n validated by caller tests")
    }

    pub fn complete(n: u8) -> SmallGraph {
        SmallGraph::empty(n).complement()
    }

    pub fn path(n: u8) -> SmallGraph {
        let edges: Vec<(u8, u8)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        SmallGraph::from_edges(n, &edges).expect("path edges valid")
    }

    pub fn cycle(n: u8) -> SmallGraph {
        let mut edges: Vec<(u8, u8)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        SmallGraph::from_edges(n, &edges).expect("cycle edges valid")
    }

    /// The star `K_{1, n-1}` centered at vertex 0.
    pub fn star(n: u8) -> SmallGraph {
        let edges: Vec<(u8, u8)> = (1..n).map(|i| (0, i)).collect();
        SmallGraph::from_edges(n, &edges).expect("star edges valid")
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn has_edge(&self, u: u8, v: u8) -> bool {
        self.bits >> pair_rank(u.min(v) as u64, u.max(v) as u64, self.n as u64) & 1 == 1
    }

    pub fn edge_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn edges(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> SmallGraph {
        let total = self.n as u32 * (self.n as u32 - 1) / 2;
        let mask = if total == 0 { 0 } else { (1u32 << total) - 1 };
        SmallGraph {
            n: self.n,
            bits: self.bits ^ mask,
        }
    }

    pub fn degree_sequence(&self) -> Vec<u8> {
        let mut deg = vec![0u8; self.n as usize];
        for (u, v) in self.edges() {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg.sort_unstable();
        deg
    }

    fn relabel(&self, perm: &[u8]) -> u32 {
        let mut bits = 0u32;
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    let (a, b) = (perm[u as usize], perm[v as usize]);
                    bits |= 1 << pair_rank(a.min(b) as u64, a.max(b) as u64, self.n as u64);
                }
            }
        }
        bits
    }

    /// Brute-force isomorphism by permutation enumeration (n <= 8).
    pub fn is_isomorphic_to(&self, other: &SmallGraph) -> bool {
        if self.n != other.n || self.edge_count() != other.edge_count() {
            return false;
        }
        if self.degree_sequence() != other.degree_sequence() {
            return false;
        }
        let mut perm: Vec<u8> = (0..self.n).collect();
        permutations(&mut perm, 0, &mut |p| self.relabel(p) == other.bits)
    }
}

/// Runs `found` on every permutation, stopping early on the first match.
fn permutations(perm: &mut Vec<u8>, at: usize, found: &mut impl FnMut(&[u8]) -> bool) -> bool {
    if at == perm.len() {
        return found(perm);
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        if permutations(perm, at + 1, found) {
            perm.swap(at, i);
            return true;
        }
        perm.swap(at, i);
    }
    false
}

/// The canonical representative of a 4-vertex class as a [`SmallGraph`].
pub fn class_representative(class: IsoClass4) -> SmallGraph {
    let edges: &[(u8, u8)] = match class {
        IsoClass4::E4 => &[],
        IsoClass4::K2 => &[(0, 1)],
        IsoClass4::P3 => &[(0, 1), (1, 2)],
        IsoClass4::TwoK2 => &[(0, 1), (2, 3)],
        IsoClass4::K3 => &[(0, 1), (0, 2), (1, 2)],
        IsoClass4::P4 => &[(0, 1), (1, 2), (2, 3)],
        IsoClass4::K13 => &[(0, 1), (0, 2), (0, 3)],
        IsoClass4::C4 => &[(0, 1), (1, 2), (2, 3), (0, 3)],
        IsoClass4::Paw => &[(0, 1), (0, 2), (1, 2), (0, 3)],
        IsoClass4::Diamond => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)],
        IsoClass4::K4 => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    };
    SmallGraph::from_edges(4, edges).expect("class representatives are valid")
}

/// Pairwise isomorphism and complement-isomorphism testing by permutation
/// enumeration. Distinct representatives must be non-isomorphic and no
/// representative may be isomorphic to another's complement.
pub fn validate_family(reps: &[SmallGraph]) -> Result<()> {
    if reps.is_empty() {
        return Err(Error::FamilyValidation("family is empty".into()));
    }
    let n = reps[0].n();
    if reps.iter().any(|g| g.n() != n) {
        return Err(Error::FamilyValidation(
            "representatives have mixed vertex counts".into(),
        ));
    }
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            if reps[i].is_isomorphic_to(&reps[j]) {
                return Err(Error::FamilyValidation(format!(
                    "representatives {i} and {j} are isomorphic"
                )));
            }
            if reps[i].is_isomorphic_to(&reps[j].complement()) {
                return Err(Error::FamilyValidation(format!(
                    "representative {i} is isomorphic to the complement of {j}"
                )));
            }
        }
    }
    Ok(())
}

/// A validated set of representative graphs defining a block set.
#[derive(Debug, Clone)]
pub struct BlockFamily {
    k: u32,
    reps: Vec<SmallGraph>,
}

impl BlockFamily {
    pub fn new(reps: Vec<SmallGraph>) -> Result<BlockFamily> {
        validate_family(&reps)?;
        Ok(BlockFamily {
            k: reps[0].n() as u32,
            reps,
        })
    }

    /// Family from 4-vertex classes; each class stands for its tilde class.
    pub fn from_classes(classes: &[IsoClass4]) -> Result<BlockFamily> {
        BlockFamily::new(classes.iter().map(|&c| class_representative(c)).collect())
    }

    /// Block size.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn representatives(&self) -> &[SmallGraph] {
        &self.reps
    }

    /// Acceptance table over all edge-bit patterns of a k-subset: a pattern
    /// is accepted when it is isomorphic to a representative or to a
    /// representative's complement. Computed once per family so the
    /// enumeration is a table lookup per subset.
    fn acceptance_lut(&self) -> Vec<bool> {
        let total_bits = self.k * (self.k - 1) / 2;
        let mut lut = vec![false; 1usize << total_bits];
        for (bits, slot) in lut.iter_mut().enumerate() {
            let candidate = SmallGraph::new(self.k as u8, bits as u32).expect("k <= 8");
            *slot = self.reps.iter().any(|rep| {
                candidate.is_isomorphic_to(rep) || candidate.is_isomorphic_to(&rep.complement())
            });
        }
        lut
    }
}

/// A verified 2-design: the block list plus the lambda established by
/// exhaustive pair counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    q: u64,
    k: u32,
    lambda: i128,
    blocks: Vec<Vec<u32>>,
}

impl Design {
    /// Wraps a block list after verifying the 2-design property; blocks are
    /// stored with each block sorted and the list in lexicographic order.
    pub fn new_verified(q: u64, k: u32, mut blocks: Vec<Vec<u32>>) -> Result<Design> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        let lambda = verify_block_set(q, k, &blocks)?;
        Ok(Design {
            q,
            k,
            lambda,
            blocks,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The verified pair-incidence count.
    pub fn lambda(&self) -> i128 {
        self.lambda
    }

    /// Number of blocks.
    pub fn b(&self) -> u64 {
        self.blocks.len() as u64
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// Re-runs the exhaustive verification.
    pub fn verify(&self) -> Result<i128> {
        verify_block_set(self.q, self.k, &self.blocks)
    }

    /// JSON export `{"q":.., "k":.., "lambda":.., "b":.., "blocks":[..]}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            q: u64,
            k: u32,
            lambda: i64,
            b: u64,
            blocks: &'a [Vec<u32>],
        }
        serde_json::to_string(&Export {
            q: self.q,
            k: self.k,
            lambda: self.lambda as i64,
            b: self.b(),
            blocks: &self.blocks,
        })
        .expect("design serializes")
    }

    /// Flat text export: one block per line, points space-separated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Exhaustively counts, for every pair of points, the number of containing
/// blocks. Returns lambda iff the count is constant; otherwise fails with
/// two witness pairs. Also rejects malformed or repeated blocks and checks
/// the replication-number consistency `r = lambda (q-1) / (k-1)`.
pub fn verify_block_set(q: u64, k: u32, blocks: &[Vec<u32>]) -> Result<i128> {
    if k < 2 || k as u64 > q {
        return Err(Error::InvalidArgument(format!(
            "block size {k} out of range for q = {q}"
        )));
    }
    for block in blocks {
        if block.len() != k as usize {
            return Err(Error::InvalidArgument(format!(
                "block {block:?} does not have size {k}"
            )));
        }
        if block.iter().any(|&v| v as u64 >= q) {
            return Err(Error::InvalidArgument(format!(
                "block {block:?} has a point outside [0, {q})"
            )));
        }
        if block.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "block {block:?} is not strictly increasing"
            )));
        }
    }
    if blocks.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("repeated block".into()));
    }

    let pair_total = (q * (q - 1) / 2) as usize;
    let mut pair_counts = vec![0u64; pair_total];
    let mut point_counts = vec![0u64; q as usize];
    for block in blocks {
        for (i, &x) in block.iter().enumerate() {
            point_counts[x as usize] += 1;
            for &y in &block[i + 1..] {
                pair_counts[pair_rank(x as u64, y as u64, q) as usize] += 1;
            }
        }
    }

    let lambda = pair_counts.first().copied().unwrap_or(0);
    if let Some(bad) = pair_counts.iter().position(|&c| c != lambda) {
        let good = pair_counts.iter().position(|&c| c == lambda).unwrap();
        let (lo, hi) = if pair_counts[bad] < lambda {
            (bad, good)
        } else {
            (good, bad)
        };
        return Err(Error::NotADesign {
            low_pair: pair_unrank(lo as u64, q),
            low_count: pair_counts[lo],
            high_pair: pair_unrank(hi as u64, q),
            high_count: pair_counts[hi],
        });
    }

    // Implied by pair constancy but asserted independently: the block/pair
    // double count b C(k,2) = lambda C(q,2) ...
    let b = blocks.len() as i128;
    let ki = k as i128;
    let qi = q as i128;
    if b * binomial(ki, 2) != lambda as i128 * binomial(qi, 2) {
        return Err(Error::StructuralFailure(format!(
            "b C(k,2) = {} but lambda C(q,2) = {}",
            b * binomial(ki, 2),
            lambda as i128 * binomial(qi, 2)
        )));
    }
    // ... and the replication count r = lambda (q-1)/(k-1) at every point.
    let num = lambda as i128 * (q as i128 - 1);
    if num % (k as i128 - 1) != 0 {
        return Err(Error::StructuralFailure(format!(
            "replication lambda(q-1)/(k-1) = {num}/{} is not an integer",
            k - 1
        )));
    }
    let r = (num / (k as i128 - 1)) as u64;
    if let Some(v) = point_counts.iter().position(|&c| c != r) {
        return Err(Error::StructuralFailure(format!(
            "point {v} lies in {} blocks, expected replication {r}",
            point_counts[v]
        )));
    }
    Ok(lambda as i128)
}

/// Rank of the pair `x < y` inside the lexicographic pair order on `[0, q)`.
fn pair_rank(x: u64, y: u64, q: u64) -> u64 {
    debug_assert!(x < y && y < q);
    x * (2 * q - x - 1) / 2 + (y - x - 1)
}

fn pair_unrank(rank: u64, q: u64) -> (u32, u32) {
    let mut x = 0u64;
    let mut base = 0u64;
    loop {
        let row = q - x - 1;
        if rank < base + row {
            return (x as u32, (x + 1 + rank - base) as u32);
        }
        base += row;
        x += 1;
    }
}

/// Materializes the block set of a family with the default block-size cap.
pub fn build_blocks(g: &Graph, family: &BlockFamily) -> Result<Design> {
    build_blocks_with_cap(g, family, DEFAULT_K_CAP)
}

/// Enumerates every k-subset, keeps those whose induced subgraph matches a
/// representative or its complement, and verifies the result exhaustively.
pub fn build_blocks_with_cap(g: &Graph, family: &BlockFamily, k_cap: u32) -> Result<Design> {
    let k = family.k();
    if k > k_cap {
        return Err(Error::ResourceLimit(format!(
            "block materialization capped at k <= {k_cap} (got k = {k})"
        )));
    }
    let q = g.q() as u32;
    if k > q {
        return Err(Error::InvalidArgument(format!(
            "block size {k} exceeds q = {q}"
        )));
    }
    let lut = family.acceptance_lut();
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    for_each_combination(q, k, |subset| {
        let mut bits = 0usize;
        let mut t = 0;
        for i in 0..subset.len() {
            for j in (i + 1)..subset.len() {
                if g.has_edge(subset[i] as usize, subset[j] as usize) {
                    bits |= 1 << t;
                }
                t += 1;
            }
        }
        if lut[bits] {
            blocks.push(subset.to_vec());
        }
    });
    Design::new_verified(g.q() as u64, k, blocks)
}

/// Lambda from the closed forms: `lambda = C(k,2) sum |H~| / C(q,2)` with
/// the tilde sizes taken from the k4 closed forms. Errors if the division
/// is not exact.
pub fn predicted_lambda(q: u64, k4: i128, classes: &[IsoClass4]) -> Result<i128> {
    if classes.is_empty() {
        return Err(Error::InvalidArgument("empty class family".into()));
    }
    let mut seen = [false; 11];
    for &class in classes {
        if !IsoClass4::TILDE_REPRESENTATIVES.contains(&class) {
            return Err(Error::InvalidArgument(format!(
                "{} does not name a tilde class; use its representative {}",
                class.label(),
                class.complement().label()
            )));
        }
        if seen[class.index()] {
            return Err(Error::InvalidArgument(format!(
                "class {} listed twice",
                class.label()
            )));
        }
        seen[class.index()] = true;
    }
    let tilde = TildeCounts::from_k4(q, k4)?;
    let total: i128 = classes.iter().map(|&c| tilde.get(c)).sum();
    let num = 6 * total; // C(4,2) = 6
    let den = binomial(q as i128, 2);
    if num % den != 0 {
        return Err(Error::StructuralFailure(format!(
            "lambda = 6 * {total} / {den} is not an integer"
        )));
    }
    Ok(num / den)
}

/// The four standing block sets and their verified designs:
/// `B1 = K3~`, `B2 = P3~`, `B3 = P4~ u R~ u D~`, `B4 = K4~ u K13~ u C4~`.
#[derive(Debug, Clone)]
pub struct CornerstoneDesigns {
    pub b1: Design,
    pub b2: Design,
    pub b3: Design,
    pub b4: Design,
}

impl CornerstoneDesigns {
    /// Expected lambdas `(q-5)/4`, `3(q-1)/4`, `3(q-1)(q-3)/8`,
    /// `(q-3)(q-5)/8`.
    pub fn expected_lambdas(q: u64) -> [i128; 4] {
        let q = q as i128;
        [
            (q - 5) / 4,
            3 * (q - 1) / 4,
            3 * (q - 1) * (q - 3) / 8,
            (q - 3) * (q - 5) / 8,
        ]
    }
}

/// Builds and exhaustively verifies the four designs, checking each lambda
/// against its closed form.
pub fn cornerstone_designs(g: &Graph) -> Result<CornerstoneDesigns> {
    let k3 = SmallGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)])?;
    let p3 = SmallGraph::path(3);
    let b1 = build_blocks(g, &BlockFamily::new(vec![k3])?)?;
    let b2 = build_blocks(g, &BlockFamily::new(vec![p3])?)?;
    let b3 = build_blocks(
        g,
        &BlockFamily::from_classes(&[IsoClass4::P4, IsoClass4::Paw, IsoClass4::Diamond])?,
    )?;
    let b4 = build_blocks(
        g,
        &BlockFamily::from_classes(&[IsoClass4::K4, IsoClass4::K13, IsoClass4::C4])?,
    )?;
    let expected = CornerstoneDesigns::expected_lambdas(g.q() as u64);
    let designs = CornerstoneDesigns { b1, b2, b3, b4 };
    for (i, (design, want)) in [&designs.b1, &designs.b2, &designs.b3, &designs.b4]
        .iter()
        .zip(expected)
        .enumerate()
    {
        if design.lambda() != want {
            return Err(Error::StructuralFailure(format!(
                "design B{} verified lambda {} but the closed form gives {want}",
                i + 1,
                design.lambda()
            )));
        }
    }
    Ok(designs)
}

/// The lambdas usually stated for the complements of the four cornerstone
/// designs:
///
/// ```text
/// B1c: (q-3)(q-4)(q-5)/12        B2c: (q-1)(q-3)(q-4)/8
/// B3c: (q-1)(q-3)(q-4)(q-5)/32   B4c: (q-3)(q-4)(q-5)^2/96
/// ```
///
/// Exhaustive verification disagrees with the first one by a factor of two
/// (the pair count `b - 2r + lambda` gives `(q-3)(q-4)(q-5)/24`), so these
/// are comparison baselines, not ground truth; reports flag each design as
/// match or mismatch.
pub fn complement_reference_lambdas(q: u64) -> [i128; 4] {
    let q = q as i128;
    [
        (q - 3) * (q - 4) * (q - 5) / 12,
        (q - 1) * (q - 3) * (q - 4) / 8,
        (q - 1) * (q - 3) * (q - 4) * (q - 5) / 32,
        (q - 3) * (q - 4) * (q - 5) * (q - 5) / 96,
    ]
}

/// Replaces every block by its point-set complement and re-verifies.
pub fn complement_design(d: &Design) -> Result<Design> {
    let q = d.q();
    let blocks: Vec<Vec<u32>> = d
        .blocks()
        .iter()
        .map(|block| {
            let inside: Vec<bool> = {
                let mut m = vec![false; q as usize];
                for &v in block {
                    m[v as usize] = true;
                }
                m
            };
            (0..q as u32).filter(|&v| !inside[v as usize]).collect()
        })
        .collect();
    Design::new_verified(q, (q - d.k() as u64) as u32, blocks)
}

/// One row of the 62-family table: the family, the lambda predicted by the
/// closed forms, the lambda established by exhaustive pair counting, and
/// the comparison against the embedded reference table.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixRow {
    pub classes: Vec<IsoClass4>,
    pub block_count: u64,
    pub lambda_predicted: i64,
    pub lambda_verified: i64,
    pub reference_lambda: Option<i64>,
    pub matches_reference: bool,
}

impl AppendixRow {
    pub fn family_label(&self) -> String {
        let labels: Vec<&str> = self.classes.iter().map(|c| c.label()).collect();
        labels.join("+")
    }
}

/// Builds all 62 nonempty proper subsets of the six tilde classes, verifies
/// each exhaustively, and insists the verified lambda equals the predicted
/// one. The empty family and the all-six family (the trivial complete
/// design on 4-subsets) are excluded.
pub fn appendix_table(g: &Graph) -> Result<Vec<AppendixRow>> {
    appendix_table_with_cap(g, DEFAULT_APPENDIX_Q_CAP)
}

pub fn appendix_table_with_cap(g: &Graph, q_cap: u64) -> Result<Vec<AppendixRow>> {
    let q = g.q() as u64;
    if q > q_cap {
        return Err(Error::ResourceLimit(format!(
            "appendix table capped at q <= {q_cap} (got q = {q})"
        )));
    }
    let k4 = k4_fast(g)?;
    let pair_total = (q * (q - 1) / 2) as usize;

    // Pair-incidence counters and block totals per tilde class, shared by
    // all 62 families: classify every 4-subset once.
    let mut pair_counts = vec![[0u64; 6]; pair_total];
    let mut block_totals = [0u64; 6];
    let qv = g.q() as u32;
    let mut failure: Option<Error> = None;
    for_each_combination(qv, 4, |subset| {
        if failure.is_some() {
            return;
        }
        let set = [
            subset[0] as usize,
            subset[1] as usize,
            subset[2] as usize,
            subset[3] as usize,
        ];
        let class = match classify_4set(g, set) {
            Ok(c) => c,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let slot = tilde_slot(class);
        block_totals[slot] += 1;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let r = pair_rank(subset[i] as u64, subset[j] as u64, q) as usize;
                pair_counts[r][slot] += 1;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }

    // Cross-check the materialized tilde sizes against the closed forms.
    let tilde = TildeCounts::from_k4(q, k4)?;
    for (slot, &class) in IsoClass4::TILDE_REPRESENTATIVES.iter().enumerate() {
        if block_totals[slot] as i128 != tilde.get(class) {
            return Err(Error::StructuralFailure(format!(
                "materialized {} blocks of {} but the closed form gives {}",
                block_totals[slot],
                class.label(),
                tilde.get(class)
            )));
        }
    }

    let mut rows = Vec::with_capacity(62);
    for mask in family_masks() {
        let classes: Vec<IsoClass4> = IsoClass4::TILDE_REPRESENTATIVES
            .iter()
            .copied()
            .enumerate()
            .filter(|(slot, _)| mask >> slot & 1 == 1)
            .map(|(_, c)| c)
            .collect();
        let predicted = predicted_lambda(q, k4, &classes)?;

        // Exhaustive verification: the family's blocks are the disjoint
        // union of its tilde classes, so each pair's incidence is the sum
        // of the per-class counters.
        let family_count = |counts: &[u64; 6]| -> u64 {
            (0..6)
                .filter(|slot| mask >> slot & 1 == 1)
                .map(|slot| counts[slot])
                .sum()
        };
        let verified = family_count(&pair_counts[0]);
        for (rank, counts) in pair_counts.iter().enumerate().skip(1) {
            let c = family_count(counts);
            if c != verified {
                return Err(Error::NotADesign {
                    low_pair: pair_unrank(0, q),
                    low_count: verified,
                    high_pair: pair_unrank(rank as u64, q),
                    high_count: c,
                });
            }
        }
        if verified as i128 != predicted {
            return Err(Error::StructuralFailure(format!(
                "family {classes:?}: predicted lambda {predicted} but verification counted {verified}"
            )));
        }

        let reference_lambda = reference::design_lambda_q29(&classes).filter(|_| q == 29);
        let block_count = (0..6)
            .filter(|slot| mask >> slot & 1 == 1)
            .map(|slot| block_totals[slot])
            .sum();
        rows.push(AppendixRow {
            classes,
            block_count,
            lambda_predicted: predicted as i64,
            lambda_verified: verified as i64,
            reference_lambda,
            matches_reference: reference_lambda == Some(verified as i64),
        });
    }
    Ok(rows)
}

fn tilde_slot(class: IsoClass4) -> usize {
    IsoClass4::TILDE_REPRESENTATIVES
        .iter()
        .position(|&c| c == class || c == class.complement())
        .expect("every class belongs to a tilde slot")
}

/// The 62 family bitmasks over the six tilde slots, ordered by family size
/// then lexicographically by member position.
fn family_masks() -> Vec<u8> {
    let mut masks: Vec<u8> = (1u8..63).collect();
    masks.sort_by_key(|&m| {
        // Equal-length digit strings compare like the member lists.
        let mut key = 0u32;
        for slot in 0..6 {
            if m >> slot & 1 == 1 {
                key = key << 3 | (slot as u32 + 1);
            }
        }
        (m.count_ones(), key)
    });
    masks
}

/// Visits every k-combination of `[0, n)` in lexicographic order.
pub(crate) fn for_each_combination(n: u32, k: u32, mut f: impl FnMut(&[u32])) {
    if k == 0 || k > n {
        return;
    }
    let k = k as usize;
    let mut idx: Vec<u32> = (0..k as u32).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - (k - i) as u32 {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn paley(p: u64, r: u32) -> Graph {
        Graph::paley(&FieldSpec::new(p, r).unwrap()).unwrap()
    }

    #[test]
    fn combinations_visit_everything_in_order() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn small_graph_complement_and_isomorphism() {
        let c4 = SmallGraph::cycle(4);
        let matching = SmallGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(c4.complement().is_isomorphic_to(&matching));
        let p4 = SmallGraph::path(4);
        assert!(p4.is_isomorphic_to(&p4.complement()));
        assert!(!c4.is_isomorphic_to(&p4));
    }

    #[test]
    fn class_representatives_match_their_class() {
        for class in IsoClass4::ALL {
            let rep = class_representative(class);
            assert_eq!(rep.edge_count(), class.edge_count());
            let comp = class_representative(class.complement());
            assert!(rep.complement().is_isomorphic_to(&comp));
        }
    }

    #[test]
    fn validate_family_examples() {
        // different edge counts, complements differ too
        assert!(validate_family(&[
            class_representative(IsoClass4::K4),
            class_representative(IsoClass4::Diamond)
        ])
        .is_ok());
        // complement clash: the complement of C4 is the perfect matching
        let err = validate_family(&[
            class_representative(IsoClass4::C4),
            class_representative(IsoClass4::TwoK2),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::FamilyValidation(ref m) if m.contains("complement")));
        // isomorphism clash: a relabeled path
        let p4 = SmallGraph::path(4);
        let p4_relabeled = SmallGraph::from_edges(4, &[(2, 0), (0, 3), (3, 1)]).unwrap();
        let err = validate_family(&[p4, p4_relabeled]).unwrap_err();
        assert!(matches!(err, Error::FamilyValidation(ref m) if m.contains("isomorphic")));
    }

    #[test]
    fn self_complementary_single_representative_is_fine() {
        assert!(BlockFamily::new(vec![SmallGraph::path(4)]).is_ok());
    }

    #[test]
    fn build_blocks_k4_family_at_29() {
        let g = paley(29, 1);
        let fam = BlockFamily::from_classes(&[IsoClass4::K4]).unwrap();
        let d = build_blocks(&g, &fam).unwrap();
        assert_eq!(d.b(), 406); // 2 * k4
        assert_eq!(d.lambda(), 6);
    }

    #[test]
    fn build_blocks_k3_family_at_13() {
        let g = paley(13, 1);
        let k3 = SmallGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let d = build_blocks(&g, &BlockFamily::new(vec![k3]).unwrap()).unwrap();
        assert_eq!(d.b(), 52);
        assert_eq!(d.lambda(), 2);
    }

    #[test]
    fn pair_family_is_the_trivial_complete_design() {
        let g = paley(13, 1);
        let k2 = SmallGraph::from_edges(2, &[(0, 1)]).unwrap();
        let d = build_blocks(&g, &BlockFamily::new(vec![k2]).unwrap()).unwrap();
        assert_eq!(d.b(), 78); // C(13,2)
        assert_eq!(d.lambda(), 1);
    }

    #[test]
    fn p3_family_lambda_at_13() {
        let g = paley(13, 1);
        let d = build_blocks(&g, &BlockFamily::new(vec![SmallGraph::path(3)]).unwrap()).unwrap();
        assert_eq!(d.lambda(), 9); // 3(q-1)/4
    }

    #[test]
    fn k_cap_is_enforced() {
        let g = paley(13, 1);
        let fam = BlockFamily::new(vec![SmallGraph::cycle(6)]).unwrap();
        assert!(matches!(
            build_blocks(&g, &fam),
            Err(Error::ResourceLimit(_))
        ));
        assert!(build_blocks_with_cap(&g, &fam, 6).is_ok());
    }

    #[test]
    fn verify_rejects_non_designs() {
        // two blocks covering pair (0,1) twice and (2,3) never
        let err = verify_block_set(5, 3, &[vec![0, 1, 2], vec![0, 1, 3]]).unwrap_err();
        assert!(matches!(err, Error::NotADesign { .. }));
        // an empty block set is vacuously a design with lambda 0
        assert_eq!(verify_block_set(5, 3, &[]).unwrap(), 0);
    }

    #[test]
    fn verify_rejects_repeated_blocks() {
        let err = verify_block_set(5, 2, &[vec![0, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn cornerstone_lambdas_at_29_and_13_and_9() {
        let d29 = cornerstone_designs(&paley(29, 1)).unwrap();
        assert_eq!(
            [
                d29.b1.lambda(),
                d29.b2.lambda(),
                d29.b3.lambda(),
                d29.b4.lambda()
            ],
            [6, 21, 273, 78]
        );
        let d13 = cornerstone_designs(&paley(13, 1)).unwrap();
        assert_eq!(
            [
                d13.b1.lambda(),
                d13.b2.lambda(),
                d13.b3.lambda(),
                d13.b4.lambda()
            ],
            [2, 9, 45, 10]
        );
        let d9 = cornerstone_designs(&paley(3, 2)).unwrap();
        assert_eq!(d9.b3.lambda(), 18); // 3(q-1)(q-3)/8 at q = 9
    }

    #[test]
    fn pentagon_designs_are_empty_or_tiny() {
        let d5 = cornerstone_designs(&paley(5, 1)).unwrap();
        assert_eq!(d5.b1.lambda(), 0);
        assert_eq!(d5.b1.b(), 0);
        assert_eq!(d5.b3.lambda(), 3);
    }

    #[test]
    fn complement_design_of_b1_at_29() {
        let g = paley(29, 1);
        let d = cornerstone_designs(&g).unwrap();
        let comp = complement_design(&d.b1).unwrap();
        assert_eq!(comp.k(), 26);
        assert_eq!(comp.b(), d.b1.b());
        // b - 2r + lambda = 812 - 168 + 6
        assert_eq!(comp.lambda(), 650);
        let back = complement_design(&comp).unwrap();
        assert_eq!(back, d.b1);
    }

    #[test]
    fn complement_design_of_b4_at_29() {
        let g = paley(29, 1);
        let d = cornerstone_designs(&g).unwrap();
        let comp = complement_design(&d.b4).unwrap();
        assert_eq!(comp.k(), 25);
        assert_eq!(comp.lambda(), 3900); // (q-3)(q-4)(q-5)^2 / 96
    }

    #[test]
    fn complement_reference_formulas_at_29() {
        let refs = complement_reference_lambdas(29);
        assert_eq!(refs, [1300, 2275, 13650, 3900]);
        // verified values: only the first disagrees (650, a factor of two)
        let g = paley(29, 1);
        let d = cornerstone_designs(&g).unwrap();
        let verified = [
            complement_design(&d.b1).unwrap().lambda(),
            complement_design(&d.b2).unwrap().lambda(),
            complement_design(&d.b3).unwrap().lambda(),
            complement_design(&d.b4).unwrap().lambda(),
        ];
        assert_eq!(verified, [650, 2275, 13650, 3900]);
    }

    #[test]
    fn predicted_lambda_examples_at_29() {
        assert_eq!(predicted_lambda(29, 203, &[IsoClass4::K4]).unwrap(), 6);
        assert_eq!(
            predicted_lambda(29, 203, &[IsoClass4::Diamond]).unwrap(),
            54
        );
        assert_eq!(predicted_lambda(29, 203, &[IsoClass4::C4]).unwrap(), 36);
        assert_eq!(predicted_lambda(29, 203, &[IsoClass4::P4]).unwrap(), 75);
        assert!(predicted_lambda(29, 203, &[IsoClass4::E4]).is_err());
        assert!(predicted_lambda(29, 203, &[IsoClass4::K4, IsoClass4::K4]).is_err());
    }

    #[test]
    fn family_masks_are_the_62_nontrivial_subsets() {
        let masks = family_masks();
        assert_eq!(masks.len(), 62);
        assert!(!masks.contains(&0));
        assert!(!masks.contains(&63));
        let sizes: Vec<u32> = masks.iter().map(|m| m.count_ones()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn appendix_table_at_29_arbitrates_the_reference_rows() {
        let rows = appendix_table(&paley(29, 1)).unwrap();
        assert_eq!(rows.len(), 62);
        for row in &rows {
            assert_eq!(row.lambda_predicted, row.lambda_verified);
            let involves = row
                .classes
                .iter()
                .any(|&c| c == IsoClass4::C4 || c == IsoClass4::P4);
            assert_eq!(
                row.matches_reference,
                !involves,
                "family {} verified {} reference {:?}",
                row.family_label(),
                row.lambda_verified,
                row.reference_lambda
            );
        }
        let find = |classes: &[IsoClass4]| {
            rows.iter()
                .find(|r| r.classes == classes)
                .unwrap_or_else(|| panic!("family {classes:?} missing"))
        };
        assert_eq!(
            find(&[IsoClass4::K4, IsoClass4::Diamond]).lambda_verified,
            60
        );
        assert_eq!(find(&[IsoClass4::Paw]).lambda_verified, 144);
        let b4 = find(&[IsoClass4::K4, IsoClass4::C4, IsoClass4::K13]);
        assert_eq!(b4.lambda_verified, 78);
        assert_eq!(b4.reference_lambda, Some(132));
        let b3 = find(&[IsoClass4::Diamond, IsoClass4::Paw, IsoClass4::P4]);
        assert_eq!(b3.lambda_verified, 273);
    }

    #[test]
    fn appendix_additivity_and_pair_partition() {
        let rows = appendix_table(&paley(29, 1)).unwrap();
        let single = |class: IsoClass4| {
            rows.iter()
                .find(|r| r.classes == [class])
                .unwrap()
                .lambda_verified
        };
        let singles: Vec<i64> = IsoClass4::TILDE_REPRESENTATIVES
            .iter()
            .map(|&c| single(c))
            .collect();
        // every 4-set containing a fixed pair lies in exactly one class
        assert_eq!(singles.iter().sum::<i64>(), 351); // C(27,2)
        for row in &rows {
            let sum: i64 = row.classes.iter().map(|&c| single(c)).sum();
            assert_eq!(row.lambda_verified, sum, "family {}", row.family_label());
        }
    }

    #[test]
    fn appendix_respects_the_cap() {
        assert!(matches!(
            appendix_table_with_cap(&paley(29, 1), 17),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn k3_and_p3_designs_reproduce_their_lambdas_up_to_101() {
        let k3 = SmallGraph::complete(3);
        let p3 = SmallGraph::path(3);
        for q in [53u64, 61, 73, 81, 89, 97, 101] {
            let (p, r) = match q {
                81 => (3, 4),
                _ => (q, 1),
            };
            let g = paley(p, r);
            let b1 = build_blocks(&g, &BlockFamily::new(vec![k3]).unwrap()).unwrap();
            assert_eq!(b1.lambda(), (q as i128 - 5) / 4, "q = {q}");
            let b2 = build_blocks(&g, &BlockFamily::new(vec![p3]).unwrap()).unwrap();
            assert_eq!(b2.lambda(), 3 * (q as i128 - 1) / 4, "q = {q}");
        }
    }

    #[test]
    fn design_exports_are_stable() {
        let g = paley(5, 1);
        let fam = BlockFamily::new(vec![SmallGraph::path(3)]).unwrap();
        let d = build_blocks(&g, &fam).unwrap();
        let json = d.to_json();
        assert!(json.starts_with(r#"{"q":5,"k":3,"lambda":"#));
        let text = d.to_text();
        let reparsed: Vec<Vec<u32>> = text
            .lines()
            .map(|l| l.split(' ').map(|t| t.parse().unwrap()).collect())
            .collect();
        assert_eq!(reparsed, d.blocks());
    }
}
