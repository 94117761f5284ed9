//! Stage-by-stage benchmarks of the detection pipeline, plus the full
//! chain on a one-minute clip. Run with `cargo bench -p adbreak-bench`.

use adbreak_bench::{
    anchor_layout, context_values, noise_frame, one_minute_clip, operating_point, training_examples,
};
use adbreak_core::{
    detect_pipeline, energy_track, extract_features, fit_ols, frame_energy_db, frame_signal,
    group_boundaries, ContextWindow, GroupingParams, PipelineParams, RegressionModel,
    FRAME_LEN_SAMPLES,
};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};

fn bench_frame_energy(c: &mut Criterion) {
    let frame = noise_frame(FRAME_LEN_SAMPLES);
    let mut group = c.benchmark_group("energy");
    group.throughput(Throughput::Elements(FRAME_LEN_SAMPLES as u64));
    group.bench_function("frame_energy_db", |b| {
        b.iter(|| frame_energy_db(std::hint::black_box(&frame)))
    });
    group.finish();
}

fn bench_energy_track(c: &mut Criterion) {
    let signal = one_minute_clip();
    let samples = signal.samples.len() as u64;
    let mut group = c.benchmark_group("energy");
    group.throughput(Throughput::Elements(samples));
    group.bench_function("energy_track_60s", |b| {
        b.iter_batched(
            || frame_signal(one_minute_clip(), FRAME_LEN_SAMPLES).unwrap(),
            |frames| energy_track(&frames).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

fn bench_features(c: &mut Criterion) {
    let window = ContextWindow {
        half_width_frames: 150,
        values_db: context_values(301),
    };
    c.bench_function("extract_features_301", |b| {
        b.iter(|| extract_features(std::hint::black_box(&window)).unwrap())
    });
}

fn bench_fit(c: &mut Criterion) {
    let examples = training_examples(200);
    let (eta, beta, half_width) = operating_point();
    c.bench_function("fit_ols_200", |b| {
        b.iter(|| fit_ols(std::hint::black_box(&examples), eta, beta, half_width).unwrap())
    });
}

fn bench_grouping(c: &mut Criterion) {
    let anchors = anchor_layout(200);
    let params = GroupingParams::default();
    c.bench_function("group_boundaries_200", |b| {
        b.iter(|| group_boundaries(std::hint::black_box(&anchors), &params, 180_000))
    });
}

fn bench_full_pipeline(c: &mut Criterion) {
    let model = RegressionModel {
        intercept: 1.0,
        ..RegressionModel::default()
    };
    let params = PipelineParams::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    group.bench_function("detect_60s", |b| {
        b.iter_batched(
            one_minute_clip,
            |signal| detect_pipeline(signal, &model, &params).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_frame_energy,
    bench_energy_track,
    bench_features,
    bench_fit,
    bench_grouping,
    bench_full_pipeline
);
criterion_main!(benches);
