//! Deterministic synthetic broadcast audio with exact ground truth.
//!
//! A synthetic programme alternates programme segments (noise at a drifting
//! level, with occasional short pauses) and ad blocks (loud commercials
//! separated by deep sub-threshold gaps). A block with k commercials has
//! k + 1 gaps — one at each block edge and one between each pair — and every
//! gap centre is annotated as a commercial boundary. Generation is a pure
//! function of the config: the same seed always yields bit-identical
//! samples and annotations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::audio::{AudioSignal, FRAME_LEN_SAMPLES};
use crate::error::{Error, Result};
use crate::evaluation::AnnotationTrack;

/// Inter-ad gaps must sit at or below this depth, well under the -60 dB
/// silence threshold.
pub const MAX_GAP_DEPTH_DB: f64 = -65.0;

/// Programme pauses must stay at or above this level (comfortably above the
/// silence threshold) unless `allow_deep_pauses` is set.
pub const SHALLOW_PAUSE_FLOOR_DB: f64 = -55.0;

/// Loudness range for commercial content, redrawn every half second.
const COMMERCIAL_DB_RANGE: (f64, f64) = (-24.0, -16.0);
const COMMERCIAL_TEXTURE_S: f64 = 0.5;
/// Duration range of programme pauses.
const PAUSE_DURATION_S: (f64, f64) = (0.2, 0.5);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProgrammeSegment {
    pub duration_s: f64,
    /// Energy range in dB; the level is redrawn roughly every second.
    pub energy_db: (f64, f64),
    /// Probability per second of inserting a short pause.
    pub pause_probability_per_s: f64,
    /// Level of inserted pauses in dB.
    pub pause_depth_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdBlockSpec {
    pub commercials: usize,
    pub commercial_duration_s: (f64, f64),
    /// Duration range of the inter-ad gaps, in seconds.
    pub gap_duration_s: (f64, f64),
    /// Level of the gaps in dB; must be at most [`MAX_GAP_DEPTH_DB`].
    pub gap_depth_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: u32,
    /// Interleaved as segment, block, segment, ...; exactly one more
    /// segment than there are blocks.
    pub programme_segments: Vec<ProgrammeSegment>,
    pub ad_blocks: Vec<AdBlockSpec>,
    /// Permit programme pauses below [`SHALLOW_PAUSE_FLOOR_DB`], i.e.
    /// confuser silences that the regression is expected to reject.
    #[serde(default)]
    pub allow_deep_pauses: bool,
}

fn default_sample_rate() -> u32 {
    48_000
}

fn check_range(range: (f64, f64), what: &str) -> Result<()> {
    if !range.0.is_finite() || !range.1.is_finite() || range.0 > range.1 {
        return Err(Error::ConfigInvalid(format!(
            "{what} range ({}, {}) is invalid",
            range.0, range.1
        )));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate_hz == 0 {
            return Err(Error::ConfigInvalid("sample rate must be positive".into()));
        }
        if self.programme_segments.len() != self.ad_blocks.len() + 1 {
            return Err(Error::ConfigInvalid(format!(
                "{} programme segments cannot interleave {} ad blocks; need blocks + 1 segments",
                self.programme_segments.len(),
                self.ad_blocks.len()
            )));
        }
        for segment in &self.programme_segments {
            if !(segment.duration_s.is_finite() && segment.duration_s > 0.0) {
                return Err(Error::ConfigInvalid(
                    "segment duration must be positive".into(),
                ));
            }
            check_range(segment.energy_db, "segment energy")?;
            if !(0.0..=1.0).contains(&segment.pause_probability_per_s) {
                return Err(Error::ConfigInvalid(
                    "pause probability must lie in [0, 1]".into(),
                ));
            }
            if !self.allow_deep_pauses && segment.pause_depth_db < SHALLOW_PAUSE_FLOOR_DB {
                return Err(Error::ConfigInvalid(format!(
                    "pause depth {} dB is below {SHALLOW_PAUSE_FLOOR_DB} dB; \
                     set allow_deep_pauses to inject confuser silences",
                    segment.pause_depth_db
                )));
            }
        }
        for block in &self.ad_blocks {
            if block.commercials == 0 {
                return Err(Error::ConfigInvalid(
                    "an ad block needs at least one commercial".into(),
                ));
            }
            check_range(block.commercial_duration_s, "commercial duration")?;
            check_range(block.gap_duration_s, "gap duration")?;
            if block.commercial_duration_s.0 <= 0.0 {
                return Err(Error::ConfigInvalid(
                    "commercial duration must be positive".into(),
                ));
            }
            if block.gap_duration_s.0 * 25.0 < 2.0 {
                return Err(Error::ConfigInvalid(
                    "gaps must last at least two frames (0.08 s)".into(),
                ));
            }
            if block.gap_depth_db > MAX_GAP_DEPTH_DB {
                return Err(Error::ConfigInvalid(format!(
                    "gap depth {} dB must be at most {MAX_GAP_DEPTH_DB} dB",
                    block.gap_depth_db
                )));
            }
        }
        Ok(())
    }
}

fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

fn push_noise(out: &mut Vec<f64>, count: usize, rms: f64, rng: &mut ChaCha8Rng) {
    for _ in 0..count {
        let z: f64 = rng.sample(StandardNormal);
        out.push((z * rms).clamp(-1.0, 1.0));
    }
}

fn draw(range: (f64, f64), rng: &mut ChaCha8Rng) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

fn synth_programme(
    out: &mut Vec<f64>,
    segment: &ProgrammeSegment,
    rate: f64,
    rng: &mut ChaCha8Rng,
) {
    let chunk_len = rate.round() as usize; // ~1 s of texture per level draw
    let end = out.len() + (segment.duration_s * rate).round() as usize;
    while out.len() < end {
        let chunk = chunk_len.min(end - out.len());
        let level = draw(segment.energy_db, rng);
        let chunk_start = out.len();
        push_noise(out, chunk, db_to_amplitude(level), rng);
        if chunk == chunk_len && rng.gen::<f64>() < segment.pause_probability_per_s {
            let pause = (draw(PAUSE_DURATION_S, rng) * rate).round() as usize;
            if pause < chunk {
                let offset = rng.gen_range(0..chunk - pause);
                let rms = db_to_amplitude(segment.pause_depth_db);
                for sample in &mut out[chunk_start + offset..chunk_start + offset + pause] {
                    let z: f64 = rng.sample(StandardNormal);
                    *sample = (z * rms).clamp(-1.0, 1.0);
                }
            }
        }
    }
}

fn synth_gap(
    out: &mut Vec<f64>,
    block: &AdBlockSpec,
    rate: f64,
    rng: &mut ChaCha8Rng,
    boundary_samples: &mut Vec<usize>,
) {
    let length = (draw(block.gap_duration_s, rng) * rate).round() as usize;
    let start = out.len();
    push_noise(out, length, db_to_amplitude(block.gap_depth_db), rng);
    boundary_samples.push(start + length / 2);
}

fn synth_commercial(out: &mut Vec<f64>, block: &AdBlockSpec, rate: f64, rng: &mut ChaCha8Rng) {
    let end = out.len() + (draw(block.commercial_duration_s, rng) * rate).round() as usize;
    let texture = (COMMERCIAL_TEXTURE_S * rate).round() as usize;
    while out.len() < end {
        let chunk = texture.min(end - out.len());
        let level = draw(COMMERCIAL_DB_RANGE, rng);
        push_noise(out, chunk, db_to_amplitude(level), rng);
    }
}

/// Generate one synthetic programme and its ground truth.
///
/// The signal is mono. Ad blocks span from the start of their leading gap to
/// the end of their trailing gap; every gap centre is a boundary annotation,
/// so a block with k commercials carries k + 1 boundaries.
pub fn generate(config: &SynthConfig) -> Result<(AudioSignal, AnnotationTrack)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rate = f64::from(config.sample_rate_hz);

    let mut samples: Vec<f64> = Vec::new();
    let mut block_samples: Vec<(usize, usize)> = Vec::new(); // [start, end) in samples
    let mut boundary_samples: Vec<usize> = Vec::new();

    for (i, segment) in config.programme_segments.iter().enumerate() {
        synth_programme(&mut samples, segment, rate, &mut rng);
        if let Some(block) = config.ad_blocks.get(i) {
            let start = samples.len();
            synth_gap(&mut samples, block, rate, &mut rng, &mut boundary_samples);
            for _ in 0..block.commercials {
                synth_commercial(&mut samples, block, rate, &mut rng);
                synth_gap(&mut samples, block, rate, &mut rng, &mut boundary_samples);
            }
            block_samples.push((start, samples.len()));
        }
    }

    let total_frames = samples.len() / FRAME_LEN_SAMPLES;
    if total_frames == 0 {
        return Err(Error::ConfigInvalid(
            "configured audio is shorter than one frame".into(),
        ));
    }
    let blocks: Vec<(usize, usize)> = block_samples
        .iter()
        .filter(|&&(start, _)| start / FRAME_LEN_SAMPLES < total_frames)
        .map(|&(start, end)| {
            (
                start / FRAME_LEN_SAMPLES,
                ((end - 1) / FRAME_LEN_SAMPLES).min(total_frames - 1),
            )
        })
        .collect();
    let boundaries: Vec<usize> = boundary_samples
        .iter()
        .map(|&s| s / FRAME_LEN_SAMPLES)
        .filter(|&f| f < total_frames && blocks.iter().any(|&(start, end)| f >= start && f <= end))
        .collect();

    let annotations = AnnotationTrack::new(blocks, boundaries, total_frames)
        .map_err(|e| Error::Internal(format!("generated annotations are inconsistent: {e}")))?;
    Ok((
        AudioSignal::mono(samples, config.sample_rate_hz),
        annotations,
    ))
}

/// A broadcast-like profile: `blocks` ad blocks of `commercials` commercials
/// each, separated by programme segments long enough (210 s) that distinct
/// blocks never chain together under the default 150 s grouping window.
pub fn default_config(seed: u64, blocks: usize, commercials: usize) -> SynthConfig {
    SynthConfig {
        seed,
        sample_rate_hz: 48_000,
        programme_segments: (0..=blocks)
            .map(|_| ProgrammeSegment {
                duration_s: 210.0,
                energy_db: (-32.0, -22.0),
                pause_probability_per_s: 0.08,
                pause_depth_db: -50.0,
            })
            .collect(),
        ad_blocks: (0..blocks)
            .map(|_| AdBlockSpec {
                commercials,
                commercial_duration_s: (18.0, 30.0),
                gap_duration_s: (0.3, 0.9),
                gap_depth_db: -80.0,
            })
            .collect(),
        allow_deep_pauses: false,
    }
}

/// A small corpus of distinct programmes: 2-3 ad blocks of 4-8 commercials
/// each, every programme at least ten minutes long.
pub fn default_corpus(seed: u64, programmes: usize) -> Vec<SynthConfig> {
    (0..programmes)
        .map(|i| {
            let blocks = 2 + i % 2;
            let commercials = 4 + (i * 2) % 5;
            default_config(seed.wrapping_add(i as u64), blocks, commercials)
        })
        .collect()
}
