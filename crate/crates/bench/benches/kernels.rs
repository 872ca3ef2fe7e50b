use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use entangle_bench::{bernoulli_operands, cyclic_dynamics, golden_instance};
use entangle_core::random::{random_matrix, seeded};
use entangle_core::spectral::{cesaro_kernel, Phase};

fn entangled_averages(c: &mut Criterion) {
    let mut group = c.benchmark_group("entangled_average");
    let inst = golden_instance(&[1, 2, 1, 2], 1);
    for n in [8u64, 16, 32] {
        group.bench_with_input(BenchmarkId::new("time_domain", n), &n, |b, &n| {
            b.iter(|| inst.average_time_domain(black_box(n)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("spectral", n), &n, |b, &n| {
            b.iter(|| inst.average_spectral(black_box(n)).unwrap())
        });
    }
    group.bench_function("limit", |b| b.iter(|| inst.entangled_limit().unwrap()));
    group.finish();
}

fn kernel(c: &mut Criterion) {
    let float = Phase::turns(0.618_033_988_749_895).unwrap();
    let exact = Phase::rational(3, 7).unwrap();
    c.bench_function("cesaro_kernel/float", |b| b.iter(|| cesaro_kernel(black_box(&float), black_box(4096))));
    c.bench_function("cesaro_kernel/rational", |b| b.iter(|| cesaro_kernel(black_box(&exact), black_box(4096))));
}

fn bernoulli(c: &mut Criterion) {
    let mut group = c.benchmark_group("bernoulli_multiply");
    for spread in [4i64, 16, 64] {
        let (sys, op, v) = bernoulli_operands(3, spread);
        group.bench_with_input(BenchmarkId::from_parameter(spread), &spread, |b, _| {
            b.iter(|| sys.multiply(black_box(&op), black_box(&v)))
        });
    }
    group.finish();
}

fn diagonal(c: &mut Criterion) {
    let td = cyclic_dynamics(8);
    let mut rng = seeded(2);
    let a = entangle_core::ComplexMatrix::from_diagonal(random_matrix(&mut rng, 8, 1).entries());
    let b = entangle_core::ComplexMatrix::from_diagonal(random_matrix(&mut rng, 8, 1).entries());
    c.bench_function("diagonal_cesaro_vector/m8_n512", |bch| {
        bch.iter(|| td.diagonal_cesaro_vector(black_box(&a), black_box(&b), 512))
    });
}

criterion_group!(benches, entangled_averages, kernel, bernoulli, diagonal);
criterion_main!(benches);
