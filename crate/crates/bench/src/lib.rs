//! Shared fixtures for the benchmarks.

use paley_designs::field::FieldSpec;
use paley_designs::graph::Graph;

pub fn paley(p: u64, r: u32) -> Graph {
    Graph::paley(&FieldSpec::new(p, r).expect("valid field")).expect("admissible order")
}

pub fn peisert(p: u64, r: u32) -> Graph {
    Graph::peisert(&FieldSpec::new(p, r).expect("valid field")).expect("admissible order")
}
