//! Grouping accepted boundary silences into advertising regions.
//!
//! Accepted silence anchors are chained: consecutive anchors no more than
//! `window_frames` apart belong to the same chain. A chain becomes an
//! [`AdRegion`] when it holds at least `min_silences` anchors and spans at
//! least `min_region_frames` frames; the region runs from its first anchor
//! to its last, inclusive.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default grouping window: 150 s at 25 fps.
pub const DEFAULT_WINDOW_FRAMES: usize = 3750;
/// Default minimum region span: 60 s at 25 fps.
pub const DEFAULT_MIN_REGION_FRAMES: usize = 1500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupingParams {
    /// Maximum gap between consecutive anchors within one chain.
    pub window_frames: usize,
    /// Minimum span (first to last anchor, inclusive) of an emitted region.
    pub min_region_frames: usize,
    /// Minimum number of anchors supporting a region; at least 2.
    pub min_silences: usize,
    /// Offset added to both emitted region edges, clamped to the recording.
    /// Zero keeps regions anchored at their supporting silences; setting it
    /// to `window_frames` reproduces the variant where a region is marked
    /// only once its first silence leaves the long-term window.
    pub edge_offset_frames: i64,
}

impl Default for GroupingParams {
    fn default() -> Self {
        GroupingParams {
            window_frames: DEFAULT_WINDOW_FRAMES,
            min_region_frames: DEFAULT_MIN_REGION_FRAMES,
            min_silences: 2,
            edge_offset_frames: 0,
        }
    }
}

impl GroupingParams {
    pub fn validate(&self) -> Result<()> {
        if self.window_frames == 0 {
            return Err(Error::ConfigInvalid(
                "window_frames must be positive".into(),
            ));
        }
        if self.min_region_frames == 0 {
            return Err(Error::ConfigInvalid(
                "min_region_frames must be positive".into(),
            ));
        }
        if self.min_silences < 2 {
            return Err(Error::ConfigInvalid(
                "min_silences must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// A detected advertising region; frame indices are inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdRegion {
    pub start_frame: usize,
    pub end_frame: usize,
    /// Number of accepted silences supporting the region.
    pub silence_count: usize,
}

fn clamp_edge(frame: usize, offset: i64, total_frames: usize) -> usize {
    let shifted = frame as i64 + offset;
    shifted.clamp(0, total_frames as i64 - 1) as usize
}

/// Group accepted silence anchors (sorted ascending, all within
/// `0..total_frames`) into advertising regions.
pub fn group_boundaries(
    anchors: &[usize],
    params: &GroupingParams,
    total_frames: usize,
) -> Vec<AdRegion> {
    debug_assert!(
        anchors.windows(2).all(|w| w[0] < w[1]),
        "anchors must ascend"
    );
    debug_assert!(anchors.iter().all(|&a| a < total_frames));
    if total_frames == 0 {
        return Vec::new();
    }
    let mut regions = Vec::new();
    let mut chain_start = 0usize;
    for i in 1..=anchors.len() {
        let chain_ends = i == anchors.len() || anchors[i] - anchors[i - 1] > params.window_frames;
        if !chain_ends {
            continue;
        }
        let chain = &anchors[chain_start..i];
        chain_start = i;
        let first = chain[0];
        let last = chain[chain.len() - 1];
        let span = last - first + 1;
        if chain.len() < params.min_silences || span < params.min_region_frames {
            continue;
        }
        regions.push(AdRegion {
            start_frame: clamp_edge(first, params.edge_offset_frames, total_frames),
            end_frame: clamp_edge(last, params.edge_offset_frames, total_frames),
            silence_count: chain.len(),
        });
    }
    regions
}

/// Expand regions into per-frame booleans over `0..total_frames`.
/// Regions must be sorted, non-overlapping, and inside the recording.
pub fn regions_to_frame_labels(regions: &[AdRegion], total_frames: usize) -> Result<Vec<bool>> {
    let mut labels = vec![false; total_frames];
    let mut previous_end: Option<usize> = None;
    for region in regions {
        if region.start_frame > region.end_frame || region.end_frame >= total_frames {
            return Err(Error::RegionOutOfBounds(format!(
                "region [{}, {}] does not fit a recording of {total_frames} frames",
                region.start_frame, region.end_frame
            )));
        }
        if let Some(prev) = previous_end {
            if region.start_frame <= prev {
                return Err(Error::RegionOutOfBounds(format!(
                    "region [{}, {}] overlaps or precedes an earlier region ending at {prev}",
                    region.start_frame, region.end_frame
                )));
            }
        }
        labels[region.start_frame..=region.end_frame].fill(true);
        previous_end = Some(region.end_frame);
    }
    Ok(labels)
}

/// Render regions as `start_frame,end_frame,silence_count` CSV, preceded by
/// a comment line recording the grouping parameters.
pub fn regions_csv(regions: &[AdRegion], params: &GroupingParams) -> String {
    let mut out = format!(
        "# window_frames={} min_region_frames={} min_silences={} edge_offset_frames={}\n",
        params.window_frames,
        params.min_region_frames,
        params.min_silences,
        params.edge_offset_frames
    );
    out.push_str("start_frame,end_frame,silence_count\n");
    for r in regions {
        let _ = writeln!(out, "{},{},{}", r.start_frame, r.end_frame, r.silence_count);
    }
    out
}

/// Parse a region CSV produced by [`regions_csv`]. Comment lines and the
/// header are skipped; regions must be sorted and non-overlapping.
pub fn parse_regions_csv(text: &str) -> Result<Vec<AdRegion>> {
    let mut regions: Vec<AdRegion> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "start_frame,end_frame,silence_count"
        {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::RegionOutOfBounds(format!(
                "line {}: expected start_frame,end_frame,silence_count",
                number + 1
            )));
        }
        let parse = |s: &str, what: &str| -> Result<usize> {
            s.trim().parse().map_err(|_| {
                Error::RegionOutOfBounds(format!("line {}: bad {what} {s:?}", number + 1))
            })
        };
        let region = AdRegion {
            start_frame: parse(fields[0], "start_frame")?,
            end_frame: parse(fields[1], "end_frame")?,
            silence_count: parse(fields[2], "silence_count")?,
        };
        if region.start_frame > region.end_frame {
            return Err(Error::RegionOutOfBounds(format!(
                "line {}: start {} after end {}",
                number + 1,
                region.start_frame,
                region.end_frame
            )));
        }
        if let Some(prev) = regions.last() {
            if region.start_frame <= prev.end_frame {
                return Err(Error::RegionOutOfBounds(format!(
                    "line {}: regions overlap or are unsorted",
                    number + 1
                )));
            }
        }
        regions.push(region);
    }
    Ok(regions)
}
