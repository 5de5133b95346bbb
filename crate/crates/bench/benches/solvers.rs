use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hiflow::{build_hierarchy, dag_approx_flow, edmonds_karp, max_flow_exact, BuildConfig, ExactConfig};
use hiflow_bench::corpus;

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_flow");
    g.sample_size(10);
    let exact = ExactConfig::default();
    for (name, inst) in corpus(1) {
        g.bench_with_input(BenchmarkId::new("ek", &name), &inst, |b, i| b.iter(|| edmonds_karp(black_box(i))));
        g.bench_with_input(BenchmarkId::new("exact", &name), &inst, |b, i| {
            b.iter(|| max_flow_exact(black_box(i), 0, &exact).unwrap())
        });
        if name.starts_with("dag") {
            g.bench_with_input(BenchmarkId::new("approx-dag", &name), &inst, |b, i| {
                b.iter(|| dag_approx_flow(black_box(i)).unwrap())
            });
        }
    }
    g.finish();
}

fn hierarchy(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_hierarchy");
    g.sample_size(10);
    let cfg = BuildConfig::default();
    for (name, inst) in corpus(1) {
        let phi = hiflow::default_phi(inst.n());
        g.bench_with_input(BenchmarkId::from_parameter(&name), &inst, |b, i| {
            b.iter(|| build_hierarchy(&i.graph, &i.cap, phi, 0, &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, solvers, hierarchy);
criterion_main!(benches);
