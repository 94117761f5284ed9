use thiserror::Error;

/// Errors raised anywhere in the detection pipeline.
///
/// The CLI maps these onto its exit-code categories: everything here is an
/// input or format problem except [`Error::InsufficientData`] (not enough
/// material to work with) and [`Error::Internal`] (a broken invariant that
/// indicates a bug rather than bad input).
#[derive(Debug, Error)]
pub enum Error {
    /// The file is structurally valid but uses a format we do not handle
    /// (non-PCM codec, unusual bit depth, more than two channels, ...).
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    /// The file cannot be parsed at all (bad header, truncated chunks).
    #[error("corrupt file: {0}")]
    CorruptFile(String),

    /// The signal is too short to produce even one analysis frame.
    #[error("signal too short: {0}")]
    EmptySignal(String),

    /// A silence anchor refers to a frame outside the energy track.
    #[error("anchor frame {anchor} out of bounds for a track of {frames} frames")]
    AnchorOutOfBounds { anchor: usize, frames: usize },

    /// A context window ended up with no values in it.
    #[error("empty context window")]
    EmptyWindow,

    /// Not enough examples or programmes for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The model file is unreadable, has the wrong version, is missing a
    /// field, or contains a non-finite value.
    #[error("model format: {0}")]
    ModelFormat(String),

    /// An annotation file does not follow the documented CSV schema.
    #[error("annotation format: {0}")]
    AnnotationFormat(String),

    /// Annotations parse but contradict themselves (overlapping blocks,
    /// boundaries outside any block, frames beyond the recording).
    #[error("inconsistent annotations: {0}")]
    AnnotationInconsistent(String),

    /// A region refers to frames outside the recording or regions overlap.
    #[error("region out of bounds: {0}")]
    RegionOutOfBounds(String),

    /// Two per-frame label tracks that must align have different lengths.
    #[error("length mismatch: predicted {predicted} frames, truth {truth} frames")]
    LengthMismatch { predicted: usize, truth: usize },

    /// A synthesis or pipeline configuration violates its documented ranges.
    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    /// An internal invariant was violated; this is a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
