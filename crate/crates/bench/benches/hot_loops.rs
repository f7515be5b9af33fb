//! Benchmarks for the paths that dominate large runs: dense graph
//! construction, the bit-sliced 4-subset census, the canonical-edge k4
//! computation, and the character sum.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use paley_designs::analysis::char_sum_raw;
use paley_designs::census::{brute_census, k4_fast};
use paley_designs::designs::{appendix_table, build_blocks, BlockFamily};
use paley_designs::field::FieldSpec;
use paley_designs::graph::Graph;
use paley_designs::IsoClass4;
use paley_designs_bench::{paley, peisert};

fn graph_build(c: &mut Criterion) {
    let f1009 = FieldSpec::new(1009, 1).unwrap();
    c.bench_function("build paley q=1009", |b| {
        b.iter(|| Graph::paley(&f1009).unwrap())
    });
    let f2401 = FieldSpec::new(7, 4).unwrap();
    c.bench_function("build peisert q=2401", |b| {
        b.iter(|| Graph::peisert(&f2401).unwrap())
    });
}

fn census(c: &mut Criterion) {
    let g61 = paley(61, 1);
    c.bench_function("brute census q=61", |b| {
        b.iter(|| brute_census(&g61).unwrap())
    });
    let g121 = peisert(11, 2);
    c.bench_function("brute census q=121 (cap raised)", |b| {
        b.iter(|| paley_designs::census::brute_census_with_cap(&g121, 200).unwrap())
    });
}

fn k4(c: &mut Criterion) {
    let g = peisert(79, 2); // q = 6241, the largest tabulated order
    c.bench_function("k4_fast peisert q=6241", |b| {
        b.iter(|| k4_fast(&g).unwrap())
    });
}

fn charsum(c: &mut Criterion) {
    let f = FieldSpec::new(101, 1).unwrap();
    c.bench_function("character sum q=101", |b| {
        b.iter(|| char_sum_raw(&f).unwrap())
    });
}

fn designs(c: &mut Criterion) {
    let g29 = paley(29, 1);
    c.bench_function("appendix table q=29", |b| {
        b.iter(|| appendix_table(&g29).unwrap())
    });
    let g49 = paley(7, 2);
    let family =
        BlockFamily::from_classes(&[IsoClass4::P4, IsoClass4::Paw, IsoClass4::Diamond]).unwrap();
    c.bench_function("build+verify B3 q=49", |b| {
        b.iter_batched(
            || family.clone(),
            |fam| build_blocks(&g49, &fam).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, graph_build, census, k4, charsum, designs);
criterion_main!(benches);
