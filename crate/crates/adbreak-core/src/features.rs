//! Local energy statistics around a silence anchor.
//!
//! Each candidate silence is described by seven statistics of the energy
//! values in a window of +/-150 frames (+/-6 s at 25 fps) centred on its
//! anchor: max, mean, min, interquartile range, standard deviation,
//! skewness, and excess kurtosis. Moments are population moments (divisor
//! n); quartiles use linear interpolation at position `p*(n-1)`.

use std::fmt::Write as _;

use crate::energy::EnergyTrack;
use crate::error::{Error, Result};

/// Default context half-width in frames: 6 s at 25 fps.
pub const DEFAULT_HALF_WIDTH_FRAMES: usize = 150;

/// Below this population variance a window counts as constant and both
/// skewness and kurtosis are defined as zero.
pub const VARIANCE_EPSILON: f64 = 1e-12;

/// The energy values around one anchor, truncated at the track edges.
#[derive(Debug, Clone)]
pub struct ContextWindow {
    pub half_width_frames: usize,
    pub values_db: Vec<f64>,
}

/// The seven window statistics, in canonical order:
/// max, mean, min, IQR, std, skewness, excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub max_db: f64,
    pub mean_db: f64,
    pub min_db: f64,
    pub iqr_db: f64,
    pub std_db: f64,
    pub skewness: f64,
    pub kurtosis_excess: f64,
}

impl FeatureVector {
    pub const DIM: usize = 7;

    /// Canonical ordering used by the regression weights and CSV dumps.
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.max_db,
            self.mean_db,
            self.min_db,
            self.iqr_db,
            self.std_db,
            self.skewness,
            self.kurtosis_excess,
        ]
    }
}

/// Extract the energies within `half_width` frames of `anchor`, truncated at
/// the track edges (no padding). The window always contains the anchor.
pub fn context_window(
    track: &EnergyTrack,
    anchor: usize,
    half_width: usize,
) -> Result<ContextWindow> {
    if anchor >= track.len() {
        return Err(Error::AnchorOutOfBounds {
            anchor,
            frames: track.len(),
        });
    }
    let start = anchor.saturating_sub(half_width);
    let end = (anchor + half_width).min(track.len() - 1);
    Ok(ContextWindow {
        half_width_frames: half_width,
        values_db: track.energies()[start..=end].to_vec(),
    })
}

/// Quantile of a sorted slice with linear interpolation at `p*(n-1)`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Compute the seven window statistics.
///
/// Population moments (divisor n) throughout; kurtosis is excess kurtosis
/// (`m4/m2^2 - 3`); a window with variance below [`VARIANCE_EPSILON`]
/// reports zero skewness and zero kurtosis.
pub fn extract_features(window: &ContextWindow) -> Result<FeatureVector> {
    let values = &window.values_db;
    if values.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let n = values.len() as f64;

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    let mean = sum / n;

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let std = m2.sqrt();
    let (skewness, kurtosis_excess) = if m2 < VARIANCE_EPSILON {
        (0.0, 0.0)
    } else {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    };

    let mut sorted = values.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);

    Ok(FeatureVector {
        max_db: max,
        mean_db: mean,
        min_db: min,
        iqr_db: iqr,
        std_db: std,
        skewness,
        kurtosis_excess,
    })
}

/// Render `(anchor, features, label)` rows as the documented feature-dump
/// CSV for training-set inspection.
pub fn features_csv(rows: &[(usize, FeatureVector, f64)]) -> String {
    let mut out = String::from("anchor_frame,max,mean,min,iqr,std,skewness,kurtosis,label\n");
    for &(anchor, f, label) in rows {
        let _ = writeln!(
            out,
            "{anchor},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            f.max_db,
            f.mean_db,
            f.min_db,
            f.iqr_db,
            f.std_db,
            f.skewness,
            f.kurtosis_excess,
            label as i64
        );
    }
    out
}
