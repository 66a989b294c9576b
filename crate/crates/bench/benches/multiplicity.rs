use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nss_core::multiplicity::{oracle_multiplicity, restricted_multiplicity, GeneralTable};
use nss_core::{MultiplicityTable, OccupancyMode, SectorKey};

fn restricted(c: &mut Criterion) {
    let mut group = c.benchmark_group("restricted_multiplicity");
    for n in [16u32, 256, 4096] {
        let l = 2 * n / 3;
        let key = SectorKey::from_twice(n, l, l % 2 + 2 * ((l as f64).sqrt() as u32 / 2)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &key, |b, &key| {
            b.iter(|| restricted_multiplicity(black_box(key)).unwrap())
        });
    }
    group.finish();
}

fn general_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("general_table_build");
    for bound in [8u32, 16, 32] {
        group.bench_with_input(BenchmarkId::from_parameter(bound), &bound, |b, &bound| {
            b.iter(|| GeneralTable::build(black_box(bound), black_box(bound)).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let key = SectorKey::from_twice(8, 8, 2).unwrap();
    c.bench_function("oracle_general_8_8_1", |b| {
        b.iter(|| oracle_multiplicity(black_box(key), OccupancyMode::General).unwrap())
    });
}

fn tables(c: &mut Criterion) {
    c.bench_function("table_restricted_6x6", |b| {
        b.iter(|| MultiplicityTable::build(OccupancyMode::Restricted, 6, 6).unwrap())
    });
    c.bench_function("table_general_8x4", |b| {
        b.iter(|| MultiplicityTable::build(OccupancyMode::General, 8, 4).unwrap())
    });
}

criterion_group!(benches, restricted, general_table, oracle, tables);
criterion_main!(benches);
