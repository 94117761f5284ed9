//! Shared fixtures for the pipeline benchmarks: deterministic audio,
//! feature sets, and anchor layouts sized like real inputs.

use adbreak_core::{
    default_config, generate, AudioSignal, FeatureVector, LabelledExample, DEFAULT_BETA,
    DEFAULT_ETA_DB,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A one-minute synthetic broadcast clip with one short ad block.
pub fn one_minute_clip() -> AudioSignal {
    let mut config = default_config(41, 1, 3);
    for segment in &mut config.programme_segments {
        segment.duration_s = 15.0;
    }
    for block in &mut config.ad_blocks {
        block.commercial_duration_s = (8.0, 12.0);
    }
    let (signal, _) = generate(&config).expect("benchmark config is valid");
    signal
}

/// A raw noise frame at a typical programme level.
pub fn noise_frame(len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..len).map(|_| rng.gen_range(-0.05..0.05)).collect()
}

/// Energy-like values for a full ±150-frame context window.
pub fn context_values(len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..len).map(|_| rng.gen_range(-90.0..-10.0)).collect()
}

/// A mixed-label training set shaped like a medium corpus.
pub fn training_examples(count: usize) -> Vec<LabelledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    (0..count)
        .map(|i| LabelledExample {
            programme_id: format!("programme_{:02}", i % 8),
            anchor_frame: i * 500,
            features: FeatureVector {
                max_db: rng.gen_range(-40.0..-5.0),
                mean_db: rng.gen_range(-70.0..-20.0),
                min_db: rng.gen_range(-120.0..-55.0),
                iqr_db: rng.gen_range(0.0..25.0),
                std_db: rng.gen_range(0.0..30.0),
                skewness: rng.gen_range(-4.0..4.0),
                kurtosis_excess: rng.gen_range(-2.0..12.0),
            },
            label: f64::from(u8::from(rng.gen_bool(0.5))),
        })
        .collect()
}

/// Sorted anchors spread like accepted silences over a two-hour recording.
pub fn anchor_layout(count: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut anchors: Vec<usize> = (0..count).map(|_| rng.gen_range(0..180_000)).collect();
    anchors.sort_unstable();
    anchors.dedup();
    anchors
}

/// Training hyper-parameters at the default operating point.
pub fn operating_point() -> (f64, f64, usize) {
    (DEFAULT_ETA_DB, DEFAULT_BETA, 150)
}
