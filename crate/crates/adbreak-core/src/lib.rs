//! Silence-driven detection of advertising regions in broadcast audio.
//!
//! Broadcast advertising blocks are bracketed and interleaved by very short,
//! very quiet gaps. This crate detects those gaps and turns them into
//! advertising regions in four stages:
//!
//! 1. [`audio`] / [`energy`]: decode the signal, split it into 1920-sample
//!    frames (40 ms at 48 kHz), measure per-frame RMS energy in dB, and merge
//!    runs of frames at or below the silence threshold (default -60 dB) into
//!    [`SilenceEvent`]s.
//! 2. [`features`]: around each silence, compute seven statistics of the
//!    energies in a +/-150-frame context window (max, mean, min, IQR, std,
//!    skewness, excess kurtosis).
//! 3. [`regression`]: score each silence with a linear model trained on 0/1
//!    labels (boundary silence or not); keep scores strictly above the
//!    decision threshold (default 0.25).
//! 4. [`grouping`]: chain accepted silences that lie within 150 s of each
//!    other; chains with at least two silences spanning at least 60 s become
//!    [`AdRegion`]s.
//!
//! [`pipeline`] wires the stages together and adds training and
//! leave-one-programme-out cross-validation; [`evaluation`] scores detections
//! frame-by-frame against annotations with the Matthews correlation
//! coefficient; [`synth`] generates deterministic test audio with exact
//! ground truth.
//!
//! ```
//! use adbreak_core::{analyze, generate, default_config, PipelineParams};
//!
//! let (signal, truth) = generate(&default_config(7, 1, 4)).unwrap();
//! let analysis = analyze(signal, &PipelineParams::default()).unwrap();
//! // Every inter-ad gap of the synthetic programme is found as a silence.
//! assert!(analysis.events.len() >= truth.commercial_boundaries().len());
//! ```

pub mod audio;
pub mod energy;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod grouping;
pub mod pipeline;
pub mod regression;
pub mod synth;

pub use audio::{
    decode_wav, downmix_to_mono, encode_wav, frame_signal, write_wav, AudioSignal, FrameSequence,
    EXPECTED_SAMPLE_RATE_HZ, FRAME_LEN_SAMPLES,
};
pub use energy::{
    detect_silence_frames, energy_csv, energy_track, frame_energy_db, merge_silence_events,
    EnergyTrack, SilenceEvent, DEFAULT_ETA_DB, SILENCE_FLOOR_DB,
};
pub use error::{Error, Result};
pub use evaluation::{
    annotations_csv, confusion_counts, mcc, parse_annotations, parse_annotations_csv,
    precision_recall_f1, AnnotationTrack, ConfusionCounts,
};
pub use features::{
    context_window, extract_features, features_csv, ContextWindow, FeatureVector,
    DEFAULT_HALF_WIDTH_FRAMES,
};
pub use grouping::{
    group_boundaries, parse_regions_csv, regions_csv, regions_to_frame_labels, AdRegion,
    GroupingParams, DEFAULT_MIN_REGION_FRAMES, DEFAULT_WINDOW_FRAMES,
};
pub use pipeline::{
    analyze, cross_validate, crossval_csv, detect_pipeline, fold_training_examples, train_model,
    AnalyzedRecording, CrossValReport, DetectionOutcome, PipelineParams, ProgrammeData,
    ProgrammeOutcome, DEFAULT_LABEL_TOLERANCE_FRAMES,
};
pub use regression::{
    classify_silences, fit_ols, label_events, load_model, model_from_json, model_to_json, predict,
    save_model, FitReport, FitResult, LabelledExample, RegressionModel, DEFAULT_BETA,
    MIN_TRAINING_EXAMPLES, MODEL_FORMAT_VERSION,
};
pub use synth::{
    default_config, default_corpus, generate, AdBlockSpec, ProgrammeSegment, SynthConfig,
    MAX_GAP_DEPTH_DB, SHALLOW_PAUSE_FLOOR_DB,
};
