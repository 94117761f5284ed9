//! Per-frame energy in dB and threshold-based silence detection.
//!
//! Each frame is summarized as `20*log10(rms)` where `rms` is the root mean
//! square of its samples. Values are clamped below at -120 dB so all-zero
//! frames stay finite. Frames at or below the silence threshold form runs
//! that are merged into [`SilenceEvent`]s anchored at their quietest frame.

use std::fmt::Write as _;

use crate::audio::FrameSequence;
use crate::error::{Error, Result};

/// Lower clamp for frame energies; an all-zero frame reports exactly this.
pub const SILENCE_FLOOR_DB: f64 = -120.0;

/// Default silence threshold (eta). A frame is silent when its energy is
/// less than or equal to this, i.e. the comparison is inclusive.
pub const DEFAULT_ETA_DB: f64 = -60.0;

/// Energies of consecutive frames, in dB, clamped below at
/// [`SILENCE_FLOOR_DB`].
#[derive(Debug, Clone)]
pub struct EnergyTrack {
    energies_db: Vec<f64>,
    frame_len_samples: usize,
}

impl EnergyTrack {
    /// Build a track directly from per-frame energies. Intended for tests
    /// and synthetic data; [`energy_track`] is the production path.
    pub fn from_energies(energies_db: Vec<f64>, frame_len_samples: usize) -> Self {
        EnergyTrack {
            energies_db,
            frame_len_samples,
        }
    }

    pub fn len(&self) -> usize {
        self.energies_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies_db.is_empty()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies_db
    }

    pub fn frame_len_samples(&self) -> usize {
        self.frame_len_samples
    }
}

/// A maximal run of consecutive silent frames. Frame indices are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SilenceEvent {
    pub start_frame: usize,
    pub end_frame: usize,
    /// The frame with the minimum energy in the run (earliest on ties).
    pub anchor_frame: usize,
    pub min_energy_db: f64,
}

/// Energy of one frame: `20*log10(sqrt(mean(x^2)))`, clamped below at
/// [`SILENCE_FLOOR_DB`]. A frame of all zeros reports the floor itself.
pub fn frame_energy_db(frame: &[f64]) -> f64 {
    debug_assert!(!frame.is_empty(), "frame must be non-empty");
    if frame.is_empty() {
        return SILENCE_FLOOR_DB;
    }
    let mean_sq = frame.iter().map(|&x| x * x).sum::<f64>() / frame.len() as f64;
    let rms = mean_sq.sqrt();
    if rms <= 0.0 {
        return SILENCE_FLOOR_DB;
    }
    (20.0 * rms.log10()).max(SILENCE_FLOOR_DB)
}

/// Compute the energy track of a frame sequence.
pub fn energy_track(frames: &FrameSequence) -> Result<EnergyTrack> {
    if frames.frame_count() == 0 {
        return Err(Error::EmptySignal("no frames to analyze".into()));
    }
    let energies_db = frames.iter().map(frame_energy_db).collect();
    Ok(EnergyTrack {
        energies_db,
        frame_len_samples: frames.frame_len_samples(),
    })
}

/// Indices of all frames with energy at or below `eta_db`, ascending.
/// The threshold is inclusive: a frame at exactly `eta_db` is silent.
pub fn detect_silence_frames(track: &EnergyTrack, eta_db: f64) -> Vec<usize> {
    track
        .energies_db
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= eta_db)
        .map(|(i, _)| i)
        .collect()
}

/// Merge sorted silence-frame indices into maximal runs of consecutive
/// frames. Each run is anchored at its minimum-energy frame; ties pick the
/// earliest frame. Returns an error if an index falls outside the track.
pub fn merge_silence_events(indices: &[usize], track: &EnergyTrack) -> Result<Vec<SilenceEvent>> {
    let mut events = Vec::new();
    let mut run_start = 0usize;
    for i in 1..=indices.len() {
        let run_ends = i == indices.len() || indices[i] != indices[i - 1] + 1;
        if !run_ends {
            continue;
        }
        let run = &indices[run_start..i];
        let start_frame = run[0];
        let end_frame = run[run.len() - 1];
        if end_frame >= track.len() {
            return Err(Error::AnchorOutOfBounds {
                anchor: end_frame,
                frames: track.len(),
            });
        }
        let mut anchor_frame = start_frame;
        let mut min_energy_db = track.energies_db[start_frame];
        for &frame in &run[1..] {
            let e = track.energies_db[frame];
            if e < min_energy_db {
                min_energy_db = e;
                anchor_frame = frame;
            }
        }
        events.push(SilenceEvent {
            start_frame,
            end_frame,
            anchor_frame,
            min_energy_db,
        });
        run_start = i;
    }
    Ok(events)
}

/// Render a track as `frame,energy_db,is_silence` CSV with the energy at six
/// decimal places, flagging silence against `eta_db`.
pub fn energy_csv(track: &EnergyTrack, eta_db: f64) -> String {
    let mut out = String::with_capacity(track.len() * 24 + 32);
    out.push_str("frame,energy_db,is_silence\n");
    for (i, &e) in track.energies_db.iter().enumerate() {
        let silent = u8::from(e <= eta_db);
        let _ = writeln!(out, "{i},{e:.6},{silent}");
    }
    out
}
