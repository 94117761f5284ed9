//! Ground-truth annotations and frame-level evaluation metrics.
//!
//! Annotations come in two levels: level-1 ad blocks (frame intervals) and
//! level-2 commercial boundaries (single frames that must lie inside a
//! block). Detection quality is scored per frame with Matthews correlation,
//! plus precision/recall/F1 for reference.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Validated two-level ground truth for one recording.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationTrack {
    ad_blocks: Vec<(usize, usize)>,
    commercial_boundaries: Vec<usize>,
    total_frames: usize,
}

impl AnnotationTrack {
    /// Sort and validate: blocks disjoint and inside the recording, boundary
    /// frames inside some block. Inclusive intervals throughout.
    pub fn new(
        mut ad_blocks: Vec<(usize, usize)>,
        mut commercial_boundaries: Vec<usize>,
        total_frames: usize,
    ) -> Result<Self> {
        ad_blocks.sort_unstable();
        for &(start, end) in &ad_blocks {
            if start > end || end >= total_frames {
                return Err(Error::AnnotationInconsistent(format!(
                    "block [{start}, {end}] does not fit a recording of {total_frames} frames"
                )));
            }
        }
        for pair in ad_blocks.windows(2) {
            if pair[1].0 <= pair[0].1 {
                return Err(Error::AnnotationInconsistent(format!(
                    "blocks [{}, {}] and [{}, {}] overlap",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                )));
            }
        }
        commercial_boundaries.sort_unstable();
        commercial_boundaries.dedup();
        for &frame in &commercial_boundaries {
            let inside = ad_blocks
                .iter()
                .any(|&(start, end)| frame >= start && frame <= end);
            if !inside {
                return Err(Error::AnnotationInconsistent(format!(
                    "boundary frame {frame} lies outside every ad block"
                )));
            }
        }
        Ok(AnnotationTrack {
            ad_blocks,
            commercial_boundaries,
            total_frames,
        })
    }

    pub fn ad_blocks(&self) -> &[(usize, usize)] {
        &self.ad_blocks
    }

    /// Sorted, deduplicated boundary frames.
    pub fn commercial_boundaries(&self) -> &[usize] {
        &self.commercial_boundaries
    }

    pub fn total_frames(&self) -> usize {
        self.total_frames
    }

    /// Per-frame truth labels: true inside any ad block.
    pub fn frame_labels(&self) -> Vec<bool> {
        let mut labels = vec![false; self.total_frames];
        for &(start, end) in &self.ad_blocks {
            labels[start..=end].fill(true);
        }
        labels
    }
}

const ANNOTATION_HEADER: &str = "level,start_frame,end_frame";

/// Parse the documented annotation CSV (`level,start_frame,end_frame` with
/// level `block` or `boundary`; boundary rows repeat their frame in both
/// columns). Blank lines, `#` comments, and the header line are skipped.
pub fn parse_annotations_csv(text: &str, total_frames: usize) -> Result<AnnotationTrack> {
    let mut blocks = Vec::new();
    let mut boundaries = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == ANNOTATION_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::AnnotationFormat(format!(
                "line {}: expected level,start_frame,end_frame",
                number + 1
            )));
        }
        let parse = |s: &str, what: &str| -> Result<usize> {
            s.trim().parse().map_err(|_| {
                Error::AnnotationFormat(format!("line {}: bad {what} {s:?}", number + 1))
            })
        };
        let start = parse(fields[1], "start_frame")?;
        let end = parse(fields[2], "end_frame")?;
        match fields[0].trim() {
            "block" => blocks.push((start, end)),
            "boundary" => {
                if start != end {
                    return Err(Error::AnnotationFormat(format!(
                        "line {}: boundary rows must have start_frame = end_frame",
                        number + 1
                    )));
                }
                boundaries.push(start);
            }
            other => {
                return Err(Error::AnnotationFormat(format!(
                    "line {}: unknown level {other:?} (expected block or boundary)",
                    number + 1
                )));
            }
        }
    }
    AnnotationTrack::new(blocks, boundaries, total_frames)
}

/// Read and parse an annotation file.
pub fn parse_annotations(path: &Path, total_frames: usize) -> Result<AnnotationTrack> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::AnnotationFormat(format!("cannot read {}: {e}", path.display())))?;
    parse_annotations_csv(&text, total_frames)
}

/// Render a track back to the documented annotation CSV.
pub fn annotations_csv(track: &AnnotationTrack) -> String {
    let mut out = String::from(ANNOTATION_HEADER);
    out.push('\n');
    for &(start, end) in track.ad_blocks() {
        let _ = writeln!(out, "block,{start},{end}");
    }
    for &frame in track.commercial_boundaries() {
        let _ = writeln!(out, "boundary,{frame},{frame}");
    }
    out
}

/// Frame-level confusion counts. Stored as u64 so metric arithmetic cannot
/// overflow for counts up to 2^31 per cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub true_negatives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }

    pub fn add(&mut self, other: &ConfusionCounts) {
        self.true_positives += other.true_positives;
        self.true_negatives += other.true_negatives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
    }
}

/// Tally predicted against truth labels frame by frame.
pub fn confusion_counts(predicted: &[bool], truth: &[bool]) -> Result<ConfusionCounts> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => counts.true_positives += 1,
            (false, false) => counts.true_negatives += 1,
            (true, false) => counts.false_positives += 1,
            (false, true) => counts.false_negatives += 1,
        }
    }
    Ok(counts)
}

/// Matthews correlation coefficient.
///
/// `(tp*tn - fp*fn) / sqrt((tp+fp)(tp+fn)(tn+fp)(tn+fn))`, defined as 0.0
/// when any denominator factor is zero. The numerator is computed in i128 so
/// large frame counts cannot overflow or lose the sign; the denominator
/// pairs the factors before the square roots, which keeps clean cases (such
/// as a perfect classification) exact.
pub fn mcc(counts: &ConfusionCounts) -> f64 {
    let tp = counts.true_positives;
    let tn = counts.true_negatives;
    let fp = counts.false_positives;
    let fn_ = counts.false_negatives;
    let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
    if factors.contains(&0) {
        return 0.0;
    }
    let numerator = tp as i128 * tn as i128 - fp as i128 * fn_ as i128;
    let denominator = (factors[0] as f64 * factors[1] as f64).sqrt()
        * (factors[2] as f64 * factors[3] as f64).sqrt();
    (numerator as f64 / denominator).clamp(-1.0, 1.0)
}

/// Precision, recall, and F1, each defined as 0.0 on a zero denominator.
pub fn precision_recall_f1(counts: &ConfusionCounts) -> (f64, f64, f64) {
    let tp = counts.true_positives as f64;
    let fp = counts.false_positives as f64;
    let fn_ = counts.false_negatives as f64;
    let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}
