//! Benchmarks for the hot paths: matrix construction, coherence scans,
//! codebook composition, and a single sparse-recovery solve.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use detsense_core::{
    base_codebook, coherence_estimate, compose_codebooks, construct_example1,
    generate_sparse_signal, measure, omp, pattern_codebook, OmpStop,
};

fn bench_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct");
    group.sample_size(10);
    group.bench_function("example1_p3", |b| {
        b.iter(|| construct_example1(3).unwrap())
    });
    group.bench_function("example1_p5", |b| {
        b.iter(|| construct_example1(5).unwrap())
    });
    group.finish();
}

fn bench_coherence(c: &mut Criterion) {
    let matrix = construct_example1(5).unwrap();
    let mut group = c.benchmark_group("coherence");
    group.sample_size(10);
    group.bench_function("full_scan_25x125", |b| {
        b.iter(|| coherence_estimate(&matrix, 1).unwrap())
    });
    group.finish();
}

fn bench_composition(c: &mut Criterion) {
    let primary = base_codebook(3).unwrap();
    let pattern = pattern_codebook(3, 3).unwrap();
    let mut group = c.benchmark_group("compose");
    group.sample_size(10);
    group.bench_function("codebooks_p3", |b| {
        b.iter(|| compose_codebooks(&primary, &pattern).unwrap())
    });
    group.finish();
}

fn bench_recovery(c: &mut Criterion) {
    let matrix = construct_example1(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let signal = generate_sparse_signal(matrix.n(), 3, &mut rng).unwrap();
    let y = measure(&matrix, &signal, None, &mut rng).unwrap();
    let mut group = c.benchmark_group("recovery");
    group.sample_size(10);
    group.bench_function("omp_k3_25x125", |b| {
        b.iter(|| omp(matrix.entries(), &y, 3, OmpStop::ExactSparsity).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_construction,
    bench_coherence,
    bench_composition,
    bench_recovery
);
criterion_main!(benches);
