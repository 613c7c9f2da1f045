use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;
use semflow::batch::{canonicalize_all_with, enrich_all_with, iso_matrix_with, Exec};
use semflow::enrich::Strictness;
use semflow_testkit::gen::{self, Boundary};
use semflow_testkit::{rng, synthetic};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn corpus(n: usize, boxes: std::ops::RangeInclusive<usize>) -> Vec<semflow::diagram::WiringDiagram> {
    let cat = synthetic::catalog();
    let mut r = rng(7);
    (0..n)
        .map(|_| {
            let k = r.gen_range(boxes.clone());
            gen::diagram(&mut r, &cat, k, &Boundary::Free)
        })
        .collect()
}

fn batch(c: &mut Criterion) {
    let diagrams = corpus(256, 10..=40);
    let o = synthetic::ontology();
    let mut g = c.benchmark_group("canonicalize_all");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| canonicalize_all_with(exec, &diagrams))
        });
    }
    g.finish();
    let mut g = c.benchmark_group("iso_matrix");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| iso_matrix_with(exec, &diagrams[..128], true))
        });
    }
    g.finish();
    let mut g = c.benchmark_group("enrich_all");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| enrich_all_with(exec, &diagrams, &o, Strictness::Lenient))
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = batch
}
criterion_main!(benches);
