use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use driftcorrect_core::{
    enumerate_small_exact, find_delta_star, mse_difference, simulate_moments, ErrorModel,
    RootOptions, Scenario, SimConfig,
};

fn analytic(c: &mut Criterion) {
    let model = ErrorModel::symmetric(0.7).unwrap();
    let scenario = Scenario::new(0.3, 0.1, 1000).unwrap();
    c.bench_function("mse_difference", |b| {
        b.iter(|| mse_difference(black_box(&model), black_box(&scenario)))
    });
    let opts = RootOptions::default();
    c.bench_function("find_delta_star", |b| {
        b.iter(|| find_delta_star(black_box(0.7), 0.3, 1000, &opts))
    });
}

fn oracles(c: &mut Criterion) {
    let model = ErrorModel::symmetric(0.7).unwrap();
    let scenario = Scenario::new(0.3, 0.1, 1000).unwrap();
    let config = SimConfig::new(model, scenario, 1_000_000, 10_000, 42).unwrap();
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    group.bench_function("simulate_10k_reps", |b| {
        b.iter(|| simulate_moments(black_box(&config)))
    });
    let small = Scenario::new(0.3, 0.1, 40).unwrap();
    group.bench_function("enumerate_n40", |b| {
        b.iter(|| enumerate_small_exact(black_box(&model), &small, 40))
    });
    group.finish();
}

criterion_group!(benches, analytic, oracles);
criterion_main!(benches);
