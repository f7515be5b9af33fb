//! Paley and Peisert graphs over GF(p^r), exact four-vertex subgraph
//! censuses, and the 2-designs their tilde classes generate.
//!
//! The crate is organized around a fixed pipeline:
//!
//! * [`field`] — arithmetic in GF(p^r) with canonical element labeling, the
//!   quadratic-residue character, and primitive roots;
//! * [`graph`] — the two graph constructions as dense bit matrices, plus
//!   strong-regularity and self-complementarity verification;
//! * [`census`] — exact counts of the 11 four-vertex induced-subgraph
//!   classes, brute force or derived from the clique count `k4`;
//! * [`designs`] — block sets from subgraph families, with every lambda
//!   established by exhaustive pair counting;
//! * [`analysis`] — the character-sum route to `k4`, edge-distribution
//!   bounds, and asymptotics, all in exact rational arithmetic;
//! * [`mod@reference`] — embedded baseline tables the regression suite and the
//!   CLI compare against.
//!
//! Everything is deterministic: fields pick the lexicographically smallest
//! irreducible modulus and the canonically smallest primitive root, so
//! vertex labels, block lists, and exported bytes are identical across runs
//! and thread counts.

pub mod analysis;
pub mod census;
pub mod designs;
pub mod error;
pub mod field;
pub mod graph;
pub mod reference;

pub use analysis::{
    analysis_report, asymptotic_ratio, char_sum_raw, decimal_string, fit_normalization,
    k4_char_sum, k4_interval, standard_normalization, thomason_check, AnalysisReport,
    BoundInterval, CharSumResult, Rational, ThomasonReport,
};
pub use census::{
    brute_census, brute_census_with_cap, census_from_k4, check_linear_relations, classify_4set,
    count_through_pair, k4_fast, k4_via_edge, triangle_counts, Census4, CensusRow, IsoClass4,
    RelationCheck, RelationReport, TildeCounts, DEFAULT_BRUTE_CAP,
};
pub use designs::{
    appendix_table, build_blocks, build_blocks_with_cap, class_representative, complement_design,
    complement_reference_lambdas, cornerstone_designs, predicted_lambda, validate_family,
    verify_block_set, AppendixRow, BlockFamily, CornerstoneDesigns, Design, SmallGraph,
    DEFAULT_APPENDIX_Q_CAP, DEFAULT_K_CAP,
};
pub use error::{Error, Result};
pub use field::{
    find_irreducible, CharValue, FieldElement, FieldSpec, PowerClassTable, DEFAULT_Q_CAP,
};
pub use graph::{Graph, GraphKind, SrgParams};
