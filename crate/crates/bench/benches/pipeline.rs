use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use psframe::estimator::{EstimatorConfig, FrameEstimator};
use psframe::frame::FrameTransform;
use psframe::sim::{run_scenario, SimConfig};
use psframe_bench::{unbalanced_six_phase, unbalanced_three_phase};
use std::hint::black_box;

fn bench_frame_identification(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame_from_samples");
    let three = unbalanced_three_phase();
    let pair3 = (three.synthesize(0.0), three.synthesize(0.005));
    group.bench_function(BenchmarkId::from_parameter(3), |b| {
        b.iter(|| FrameTransform::from_samples(black_box(&pair3.0), black_box(&pair3.1)).unwrap())
    });
    let six = unbalanced_six_phase();
    let pair6 = (six.synthesize(0.001), six.synthesize(0.006));
    group.bench_function(BenchmarkId::from_parameter(6), |b| {
        b.iter(|| FrameTransform::from_samples(black_box(&pair6.0), black_box(&pair6.1)).unwrap())
    });
    group.finish();
}

fn bench_streaming_estimator(c: &mut Criterion) {
    let spec = unbalanced_three_phase();
    let fs = 10_000.0;
    let samples: Vec<(f64, Vec<f64>)> = (0..200)
        .map(|i| {
            let t = i as f64 / fs;
            (t, spec.synthesize(t))
        })
        .collect();
    c.bench_function("estimator_push_200_samples", |b| {
        b.iter(|| {
            let mut est = FrameEstimator::new(EstimatorConfig::default()).unwrap();
            for (t, v) in &samples {
                black_box(est.push_sample(*t, v).unwrap());
            }
        })
    });
}

fn bench_scenario(c: &mut Criterion) {
    let mut cfg = SimConfig::example_scenario();
    cfg.duration = 0.05;
    let mut group = c.benchmark_group("scenario_50ms");
    group.sample_size(20);
    group.bench_function("ps_frame", |b| {
        b.iter(|| run_scenario(black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_frame_identification,
    bench_streaming_estimator,
    bench_scenario
);
criterion_main!(benches);
