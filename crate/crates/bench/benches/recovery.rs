use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use romp_bench::flat_sparse_problem;
use romp_core::{least_squares, omp_recover, regularize, romp_recover, IndexSet, RecoveryOptions};

fn recovery(c: &mut Criterion) {
    let mut group = c.benchmark_group("recover_d256");
    let opts = RecoveryOptions::default();
    for &(rows, n) in &[(64, 4), (128, 8), (160, 12)] {
        let (phi, x) = flat_sparse_problem(rows, 256, n, 1);
        group.bench_with_input(BenchmarkId::new("romp", format!("N{rows}_n{n}")), &n, |b, &n| {
            b.iter(|| romp_recover(black_box(&phi), black_box(&x), n, &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("omp", format!("N{rows}_n{n}")), &n, |b, &n| {
            b.iter(|| omp_recover(black_box(&phi), black_box(&x), n, &opts).unwrap())
        });
    }
    group.finish();
}

fn least_squares_update(c: &mut Criterion) {
    let (phi, x) = flat_sparse_problem(128, 256, 8, 2);
    for k in [8, 24] {
        let cols = IndexSet::from_unsorted((0..k).map(|j| j * 7));
        let sub = phi.restrict_columns(&cols).unwrap();
        c.bench_function(&format!("least_squares_128x{k}"), |b| {
            b.iter(|| least_squares(black_box(&sub), black_box(&x)).unwrap())
        });
    }
}

fn regularization(c: &mut Criterion) {
    let u: Vec<f64> = (0..64).map(|i| 1.0 + ((i * 37) % 64) as f64 / 9.0).collect();
    let candidates = IndexSet::from_unsorted(0..64);
    c.bench_function("regularize_64", |b| {
        b.iter(|| regularize(black_box(&u), black_box(&candidates)).unwrap())
    });
}

criterion_group!(benches, recovery, least_squares_update, regularization);
criterion_main!(benches);
