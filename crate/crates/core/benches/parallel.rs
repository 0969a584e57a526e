//! Sequential against rayon execution on the two batch workloads.

use compfn::sim::{tradeoff_experiment, SwapMap, TradeoffConfig};
use compfn::systems::e1;
use compfn::thermo::{compensation_check, dini_potential, MarkovMeasure, PhiFamily};
use compfn::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn compensation(c: &mut Criterion) {
    let (x, pi, ord) = e1();
    let f = dini_potential(&x, &pi, &ord, 5.0, 2).unwrap();
    let family = PhiFamily::standard(2, &[-2.0, -1.0, 0.0, 1.0, 2.0], 50, 1).unwrap();
    let mut g = c.benchmark_group("compensation_check");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| compensation_check(&x, &pi, &f, black_box(&family), 1e-9, exec).unwrap())
        });
    }
    g.finish();
}

fn tradeoff(c: &mut Criterion) {
    let (x, pi, ord) = e1();
    let w = |s: &str| x.parse_word(s).unwrap();
    let sm = SwapMap::new(&x, &pi, &w("aaa"), &w("aba"), false).unwrap();
    let base = MarkovMeasure::iid(&x, &[0.5, 0.0, 0.5]).unwrap();
    let f = dini_potential(&x, &pi, &ord, 5.0, 3).unwrap();
    let cfg = TradeoffConfig {
        p_grid: vec![0.1, 0.05],
        length: 100_000,
        replicates: 8,
        seed: 1,
        k: 2,
        sigmas: 3.0,
    };
    let mut g = c.benchmark_group("tradeoff_experiment");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| tradeoff_experiment(&x, &base, &sm, &f, black_box(&cfg), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, compensation, tradeoff);
criterion_main!(benches);
