use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nss_core::capacity::{
    capacity_sweep, classical_capacity, geometric_grid, quantum_capacity_exact,
    quantum_capacity_log,
};
use nss_core::CapacityKind;

fn quantum(c: &mut Criterion) {
    c.bench_function("quantum_exact_64", |b| {
        b.iter(|| quantum_capacity_exact(black_box(64)).unwrap())
    });
    let mut group = c.benchmark_group("quantum_log");
    for n in [1024u32, 16384] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| quantum_capacity_log(black_box(n)).unwrap())
        });
    }
    group.finish();
}

fn classical(c: &mut Criterion) {
    c.bench_function("classical_16384", |b| {
        b.iter(|| classical_capacity(black_box(16384)).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let grid = geometric_grid(2, 16384).unwrap();
    c.bench_function("sweep_quantum_2_16384", |b| {
        b.iter(|| capacity_sweep(black_box(&grid), CapacityKind::Quantum).unwrap())
    });
}

criterion_group!(benches, quantum, classical, sweep);
criterion_main!(benches);
