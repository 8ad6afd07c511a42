use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mtum_core::montecarlo::sample_exponential;
use mtum_core::*;

fn g1_sample(n: usize) -> GroupedSample {
    let b: GroupBoundaries = "0:1:100,200".parse().unwrap();
    let model = ExponentialModel::new(10.0).unwrap();
    group_raw(
        &sample_exponential(&model, n, &mut RandomStream::new(1, 0)),
        &b,
    )
    .unwrap()
}

fn moments(c: &mut Criterion) {
    let sample = g1_sample(1000);
    let b = sample.boundaries().clone();
    let model = ExponentialModel::new(10.0).unwrap();
    let wide = resolve_window(&b, 0.0, 140.0).unwrap();
    let narrow = resolve_window(&b, 2.0, 12.0).unwrap();
    c.bench_function("g_tT G1 (0,140)", |bench| {
        bench.iter(|| population_truncated_moment(black_box(&model), &wide))
    });
    c.bench_function("asymptotic variance G1 (0,140)", |bench| {
        bench.iter(|| asymptotic_variance(black_box(&model), 1000, &wide))
    });
    c.bench_function("solve G1 (0,140)", |bench| {
        bench.iter(|| solve(black_box(&sample), &wide, None).unwrap())
    });
    c.bench_function("solve G1 (2,12)", |bench| {
        bench.iter(|| solve(black_box(&sample), &narrow, None).unwrap())
    });
    c.bench_function("grouped MLE G1", |bench| {
        bench.iter(|| mle_estimate(black_box(&sample)).unwrap())
    });
}

fn tables(c: &mut Criterion) {
    let model = ExponentialModel::new(10.0).unwrap();
    let b: GroupBoundaries = "0:5:30,inf".parse().unwrap();
    let t = [0.0, 0.5, 1.0, 1.5, 3.0, 7.0, 14.0, 19.0, 23.0];
    let big_t = [30.0, 23.0, 19.0, 14.0, 7.0];
    c.bench_function("ARE table 9x5", |bench| {
        bench.iter(|| are_table(black_box(&model), &b, &t, &big_t))
    });
}

fn simulation(c: &mut Criterion) {
    let config = SimulationConfig {
        label: None,
        theta: 10.0,
        boundaries: "0:5:50,200".parse().unwrap(),
        windows: vec![(0.0, 200.0), (2.0, 12.0)],
        sample_sizes: vec![250],
        replications_per_batch: 100,
        batches: 2,
        seed: 1,
    };
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    group.bench_function("study 2x100 reps n=250", |bench| {
        bench.iter(|| run_study(black_box(&config)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, moments, tables, simulation);
criterion_main!(benches);
