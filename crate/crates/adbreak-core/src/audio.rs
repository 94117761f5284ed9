//! WAV ingestion: PCM decoding, mono downmix, and fixed-length framing.
//!
//! Broadcast recordings arrive as RIFF/WAVE files carrying integer PCM
//! (16, 24, or 32 bit, mono or stereo). Decoding normalizes samples to
//! [-1.0, 1.0]; framing then cuts the mono signal into non-overlapping
//! 1920-sample frames so that at 48 kHz one audio frame lines up with one
//! 25 fps video frame.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Cursor, Read, Seek, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Samples per analysis frame: 40 ms at 48 kHz, i.e. one 25 fps video frame.
pub const FRAME_LEN_SAMPLES: usize = 1920;

/// Sample rate the frame-based constants are calibrated for. Other rates are
/// accepted, but the frames-per-second figure then deviates from 25.
pub const EXPECTED_SAMPLE_RATE_HZ: u32 = 48_000;

/// Decoded PCM audio. Samples are normalized to [-1.0, 1.0] and interleaved
/// when `channel_count > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
    pub channel_count: u16,
}

impl AudioSignal {
    pub fn mono(samples: Vec<f64>, sample_rate_hz: u32) -> Self {
        AudioSignal {
            samples,
            sample_rate_hz,
            channel_count: 1,
        }
    }

    /// Duration in seconds, accounting for interleaving.
    pub fn duration_seconds(&self) -> f64 {
        if self.sample_rate_hz == 0 || self.channel_count == 0 {
            return 0.0;
        }
        self.samples.len() as f64 / f64::from(self.channel_count) / f64::from(self.sample_rate_hz)
    }
}

/// A mono signal cut into consecutive frames of `frame_len_samples` samples.
/// Any trailing partial frame is discarded, never zero-padded.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    samples: Vec<f64>,
    frame_len_samples: usize,
    sample_rate_hz: u32,
}

impl FrameSequence {
    pub fn frame_count(&self) -> usize {
        self.samples.len() / self.frame_len_samples
    }

    pub fn frame_len_samples(&self) -> usize {
        self.frame_len_samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// Frames per second; exactly 25.0 at 48 kHz with 1920-sample frames.
    pub fn frames_per_second(&self) -> f64 {
        f64::from(self.sample_rate_hz) / self.frame_len_samples as f64
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        let start = index * self.frame_len_samples;
        &self.samples[start..start + self.frame_len_samples]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.samples.chunks_exact(self.frame_len_samples)
    }
}

fn map_hound(err: hound::Error) -> Error {
    match err {
        hound::Error::Unsupported => Error::UnsupportedFormat(err.to_string()),
        other => Error::CorruptFile(other.to_string()),
    }
}

/// Decode a WAV file from disk. See [`decode_wav_reader`] for the contract.
pub fn decode_wav(path: &Path) -> Result<AudioSignal> {
    let file = File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    decode_wav_reader(BufReader::new(file))
}

/// Decode integer PCM WAV data from an arbitrary reader.
///
/// Accepts 16-, 24-, and 32-bit little-endian integer PCM with one or two
/// channels. Samples are scaled by `1 / 2^(bits-1)`, so full-scale negative
/// PCM maps to exactly -1.0. Anything non-PCM, at another bit depth, or with
/// more than two channels is rejected as unsupported; malformed or truncated
/// files are reported as corrupt.
pub fn decode_wav_reader<R: Read>(reader: R) -> Result<AudioSignal> {
    let mut wav = hound::WavReader::new(reader).map_err(map_hound)?;
    let spec = wav.spec();
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(Error::UnsupportedFormat(
            "only integer PCM samples are supported".into(),
        ));
    }
    if !matches!(spec.bits_per_sample, 16 | 24 | 32) {
        return Err(Error::UnsupportedFormat(format!(
            "unsupported bit depth {} (expected 16, 24, or 32)",
            spec.bits_per_sample
        )));
    }
    if spec.channels == 0 || spec.channels > 2 {
        return Err(Error::UnsupportedFormat(format!(
            "unsupported channel count {} (expected 1 or 2)",
            spec.channels
        )));
    }

    let scale = 1.0 / f64::from(1u32 << (spec.bits_per_sample - 1));
    let mut samples = Vec::with_capacity(wav.len() as usize);
    for sample in wav.samples::<i32>() {
        samples.push(f64::from(sample.map_err(map_hound)?) * scale);
    }
    if samples.len() % usize::from(spec.channels) != 0 {
        return Err(Error::CorruptFile(
            "sample count is not a multiple of the channel count".into(),
        ));
    }
    Ok(AudioSignal {
        samples,
        sample_rate_hz: spec.sample_rate,
        channel_count: spec.channels,
    })
}

/// Write a signal as integer PCM WAV. `bits_per_sample` must be 16, 24, or 32.
pub fn write_wav(signal: &AudioSignal, path: &Path, bits_per_sample: u16) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    write_wav_to(signal, BufWriter::new(file), bits_per_sample)
}

/// Encode a signal to an in-memory WAV byte buffer.
pub fn encode_wav(signal: &AudioSignal, bits_per_sample: u16) -> Result<Vec<u8>> {
    let mut cursor = Cursor::new(Vec::new());
    write_wav_to(signal, &mut cursor, bits_per_sample)?;
    Ok(cursor.into_inner())
}

fn write_wav_to<W: Write + Seek>(signal: &AudioSignal, out: W, bits_per_sample: u16) -> Result<()> {
    if !matches!(bits_per_sample, 16 | 24 | 32) {
        return Err(Error::UnsupportedFormat(format!(
            "unsupported bit depth {} (expected 16, 24, or 32)",
            bits_per_sample
        )));
    }
    let spec = hound::WavSpec {
        channels: signal.channel_count,
        sample_rate: signal.sample_rate_hz,
        bits_per_sample,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::new(out, spec).map_err(map_hound)?;
    let full_scale = f64::from(1u32 << (bits_per_sample - 1));
    let max = full_scale - 1.0;
    for &x in &signal.samples {
        let v = (x * full_scale).round().clamp(-full_scale, max) as i32;
        writer.write_sample(v).map_err(map_hound)?;
    }
    writer.finalize().map_err(map_hound)?;
    Ok(())
}

/// Collapse a signal to mono by equal-weight channel averaging.
/// Mono input is returned unchanged.
pub fn downmix_to_mono(signal: AudioSignal) -> Result<AudioSignal> {
    match signal.channel_count {
        1 => Ok(signal),
        2 => {
            let samples = signal
                .samples
                .chunks_exact(2)
                .map(|lr| 0.5 * (lr[0] + lr[1]))
                .collect();
            Ok(AudioSignal {
                samples,
                sample_rate_hz: signal.sample_rate_hz,
                channel_count: 1,
            })
        }
        n => Err(Error::UnsupportedFormat(format!(
            "cannot downmix {n} channels"
        ))),
    }
}

/// Cut a mono signal into consecutive `frame_len` sample frames using floor
/// division; the trailing partial frame, if any, is discarded.
pub fn frame_signal(signal: AudioSignal, frame_len: usize) -> Result<FrameSequence> {
    if frame_len == 0 {
        return Err(Error::Internal("frame length must be positive".into()));
    }
    if signal.channel_count != 1 {
        return Err(Error::UnsupportedFormat(
            "framing requires a mono signal; downmix first".into(),
        ));
    }
    let count = signal.samples.len() / frame_len;
    if count == 0 {
        return Err(Error::EmptySignal(format!(
            "{} samples is less than one {frame_len}-sample frame",
            signal.samples.len()
        )));
    }
    let mut samples = signal.samples;
    samples.truncate(count * frame_len);
    Ok(FrameSequence {
        samples,
        frame_len_samples: frame_len,
        sample_rate_hz: signal.sample_rate_hz,
    })
}
