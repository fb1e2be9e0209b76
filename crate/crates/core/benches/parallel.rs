use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use totpos::curves::{convex_curve_check, is_positive_curve_sampled, FlagCurve, MomentCurve, SampleMode};
use totpos::minors::compound_with;
use totpos::sample;
use totpos::tp::positivity;
use totpos::{Execution, Tolerance};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_positivity(c: &mut Criterion) {
    let mut group = c.benchmark_group("positivity");
    let tol = Tolerance::default();
    for n in [4, 6] {
        let m = sample::tp_matrix(&mut sample::rng(1), n);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &m, |b, m| {
                b.iter(|| positivity(black_box(m), &tol, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_compound(c: &mut Criterion) {
    let mut group = c.benchmark_group("compound");
    let m = sample::tp_matrix(&mut sample::rng(2), 7);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "n7k3"), &m, |b, m| {
            b.iter(|| compound_with(black_box(m), 3, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_curves(c: &mut Criterion) {
    let mut group = c.benchmark_group("curves");
    group.sample_size(10);
    let mc = MomentCurve::new(3).unwrap();
    let fc = FlagCurve::Osculating(mc);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "positive-m3-s8"), |b| {
            b.iter(|| is_positive_curve_sampled(&fc, 8, SampleMode::Exhaustive, exec).unwrap())
        });
        group.bench_function(BenchmarkId::new(name, "convex-m3-t1000"), |b| {
            b.iter(|| convex_curve_check(&mc, 1000, 7, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_positivity, bench_compound, bench_curves);
criterion_main!(benches);
