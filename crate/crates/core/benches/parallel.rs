use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion as Bench};
use hwt::condense::kmeans_with;
use hwt::datasets::uniform_matrix;
use hwt::filtering::threshold_sweep_with;
use hwt::hierarchy::build_hierarchy_with;
use hwt::{Criterion, Parallelism};

const STRATEGIES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn clustering(c: &mut Bench) {
    let x = uniform_matrix(600, 16, 0.0, 1.0, 1).unwrap();
    let mut g = c.benchmark_group("build_hierarchy");
    g.sample_size(10);
    for (name, par) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| build_hierarchy_with(&x, Criterion::Ward, par).unwrap())
        });
    }
    g.finish();
}

fn restarts(c: &mut Bench) {
    let x = uniform_matrix(400, 8, 0.0, 1.0, 2).unwrap();
    let mut g = c.benchmark_group("kmeans");
    g.sample_size(10);
    for (name, par) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| kmeans_with(&x, 8, 3, 20, par).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Bench) {
    let x = uniform_matrix(300, 8, 0.0, 7.9, 3).unwrap();
    let thresholds: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
    let mut g = c.benchmark_group("threshold_sweep");
    g.sample_size(10);
    for (name, par) in STRATEGIES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, &par| {
            b.iter(|| threshold_sweep_with(&x, Criterion::Ward, &thresholds, par).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, clustering, restarts, sweep);
criterion_main!(benches);
