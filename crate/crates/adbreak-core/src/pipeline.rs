//! End-to-end orchestration: signal analysis, detection, training, and
//! leave-one-programme-out cross-validation.

use serde::Serialize;

use crate::audio::{downmix_to_mono, frame_signal, AudioSignal, FRAME_LEN_SAMPLES};
use crate::energy::{
    detect_silence_frames, energy_track, merge_silence_events, EnergyTrack, SilenceEvent,
    DEFAULT_ETA_DB,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    confusion_counts, mcc, precision_recall_f1, AnnotationTrack, ConfusionCounts,
};
use crate::features::{context_window, extract_features, FeatureVector, DEFAULT_HALF_WIDTH_FRAMES};
use crate::grouping::{group_boundaries, regions_to_frame_labels, AdRegion, GroupingParams};
use crate::regression::{
    classify_silences, fit_ols, label_events, predict, FitResult, LabelledExample, RegressionModel,
    DEFAULT_BETA,
};

/// Default matching tolerance between an annotated commercial boundary and a
/// detected silence event: +/-12 frames (+/-0.48 s at 25 fps).
pub const DEFAULT_LABEL_TOLERANCE_FRAMES: usize = 12;

/// Every tunable of the detection chain in one place. The defaults are the
/// standard operating point of the method.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineParams {
    /// Silence threshold in dB (frames at or below it are silent).
    pub eta_db: f64,
    /// Regression decision threshold.
    pub beta: f64,
    /// Context half-width around each silence anchor, in frames.
    pub half_width_frames: usize,
    pub grouping: GroupingParams,
    /// Boundary-to-event matching tolerance used when labelling training
    /// examples, in frames.
    pub label_tolerance_frames: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            eta_db: DEFAULT_ETA_DB,
            beta: DEFAULT_BETA,
            half_width_frames: DEFAULT_HALF_WIDTH_FRAMES,
            grouping: GroupingParams::default(),
            label_tolerance_frames: DEFAULT_LABEL_TOLERANCE_FRAMES,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if !self.eta_db.is_finite() || self.eta_db >= 0.0 {
            return Err(Error::ConfigInvalid(format!(
                "eta must be finite and negative, got {}",
                self.eta_db
            )));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 || self.beta >= 1.0 {
            return Err(Error::ConfigInvalid(format!(
                "beta must lie in (0, 1), got {}",
                self.beta
            )));
        }
        if self.half_width_frames == 0 {
            return Err(Error::ConfigInvalid(
                "half_width_frames must be positive".into(),
            ));
        }
        self.grouping.validate()
    }

    /// Detection parameters baselined from a trained model; grouping and
    /// labelling settings keep their defaults.
    pub fn from_model(model: &RegressionModel) -> Self {
        Self {
            eta_db: model.eta,
            beta: model.beta,
            half_width_frames: model.half_width_frames,
            ..Self::default()
        }
    }
}

/// Everything extracted from one recording before any model is applied:
/// the energy track, the silent frames, the merged silence events, and one
/// feature vector per event.
#[derive(Debug, Clone)]
pub struct AnalyzedRecording {
    pub sample_rate_hz: u32,
    pub track: EnergyTrack,
    pub silence_frames: Vec<usize>,
    pub events: Vec<SilenceEvent>,
    pub features: Vec<FeatureVector>,
}

impl AnalyzedRecording {
    pub fn total_frames(&self) -> usize {
        self.track.len()
    }

    pub fn event_features(&self) -> Vec<(SilenceEvent, FeatureVector)> {
        self.events
            .iter()
            .copied()
            .zip(self.features.iter().copied())
            .collect()
    }
}

/// Run the model-independent half of the pipeline: downmix, frame, measure
/// energy, detect and merge silences, extract context features.
pub fn analyze(signal: AudioSignal, params: &PipelineParams) -> Result<AnalyzedRecording> {
    params.validate()?;
    let sample_rate_hz = signal.sample_rate_hz;
    let mono = downmix_to_mono(signal)?;
    let frames = frame_signal(mono, FRAME_LEN_SAMPLES)?;
    let track = energy_track(&frames)?;
    let silence_frames = detect_silence_frames(&track, params.eta_db);
    let events = merge_silence_events(&silence_frames, &track)?;
    let features = events
        .iter()
        .map(|event| {
            let window = context_window(&track, event.anchor_frame, params.half_width_frames)?;
            extract_features(&window)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyzedRecording {
        sample_rate_hz,
        track,
        silence_frames,
        events,
        features,
    })
}

/// The model-dependent half of a detection run.
#[derive(Debug, Clone)]
pub struct DetectionOutcome {
    pub analysis: AnalyzedRecording,
    /// Regression score per detected silence, parallel to `analysis.events`.
    pub scores: Vec<f64>,
    /// Silences whose score exceeded beta.
    pub accepted: Vec<SilenceEvent>,
    pub regions: Vec<AdRegion>,
}

/// Full detection chain: analyze the signal, score every silence with the
/// model, keep the ones above beta, and group them into ad regions.
///
/// The decision threshold is `params.beta`, not the model's: a model carries
/// the beta it was trained under as a default ([`PipelineParams::from_model`]
/// adopts it), but an explicit override in the params wins.
pub fn detect_pipeline(
    signal: AudioSignal,
    model: &RegressionModel,
    params: &PipelineParams,
) -> Result<DetectionOutcome> {
    model.validate()?;
    let analysis = analyze(signal, params)?;
    let scores: Vec<f64> = analysis
        .features
        .iter()
        .map(|f| predict(model, f))
        .collect();
    let effective = RegressionModel {
        beta: params.beta,
        ..model.clone()
    };
    let accepted = classify_silences(&effective, &analysis.event_features());
    let anchors: Vec<usize> = accepted.iter().map(|e| e.anchor_frame).collect();
    let regions = group_boundaries(&anchors, &params.grouping, analysis.total_frames());
    Ok(DetectionOutcome {
        analysis,
        scores,
        accepted,
        regions,
    })
}

/// One annotated programme of a training or evaluation corpus. A corpus may
/// contain several recordings with the same programme id; cross-validation
/// folds by id, not by entry.
#[derive(Debug, Clone)]
pub struct ProgrammeData {
    pub programme_id: String,
    pub events: Vec<SilenceEvent>,
    pub features: Vec<FeatureVector>,
    pub annotations: AnnotationTrack,
}

impl ProgrammeData {
    pub fn from_analysis(
        programme_id: &str,
        analysis: &AnalyzedRecording,
        annotations: AnnotationTrack,
    ) -> Result<Self> {
        if annotations.total_frames() != analysis.total_frames() {
            return Err(Error::AnnotationInconsistent(format!(
                "annotations for programme {programme_id} cover {} frames but the audio has {}",
                annotations.total_frames(),
                analysis.total_frames()
            )));
        }
        Ok(Self {
            programme_id: programme_id.to_string(),
            events: analysis.events.clone(),
            features: analysis.features.clone(),
            annotations,
        })
    }

    pub fn labelled_examples(&self, tolerance_frames: usize) -> Result<Vec<LabelledExample>> {
        label_events(
            &self.events,
            &self.features,
            &self.annotations,
            tolerance_frames,
            &self.programme_id,
        )
    }
}

/// Train one model on every programme of the corpus.
pub fn train_model(corpus: &[ProgrammeData], params: &PipelineParams) -> Result<FitResult> {
    params.validate()?;
    let mut examples = Vec::new();
    for programme in corpus {
        examples.extend(programme.labelled_examples(params.label_tolerance_frames)?);
    }
    fit_ols(
        &examples,
        params.eta_db,
        params.beta,
        params.half_width_frames,
    )
}

/// Distinct programme ids in first-appearance order.
fn distinct_programme_ids(corpus: &[ProgrammeData]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for programme in corpus {
        if !ids.contains(&programme.programme_id) {
            ids.push(programme.programme_id.clone());
        }
    }
    ids
}

/// All labelled examples from programmes other than `held_out_id`.
pub fn fold_training_examples(
    corpus: &[ProgrammeData],
    held_out_id: &str,
    tolerance_frames: usize,
) -> Result<Vec<LabelledExample>> {
    let mut examples = Vec::new();
    for programme in corpus {
        if programme.programme_id != held_out_id {
            examples.extend(programme.labelled_examples(tolerance_frames)?);
        }
    }
    Ok(examples)
}

/// Per-fold results of a cross-validation run.
#[derive(Debug, Clone)]
pub struct ProgrammeOutcome {
    pub programme_id: String,
    pub counts: ConfusionCounts,
    pub mcc: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub regions: Vec<AdRegion>,
    /// The fold's training labels were single-class (constant model).
    pub degenerate_fit: bool,
}

#[derive(Debug, Clone)]
pub struct CrossValReport {
    pub per_programme: Vec<ProgrammeOutcome>,
    pub pooled_counts: ConfusionCounts,
    pub pooled_mcc: f64,
    pub pooled_precision: f64,
    pub pooled_recall: f64,
    pub pooled_f1: f64,
}

/// Leave-one-programme-out cross-validation: for each distinct programme id,
/// fit on every other programme's examples, run detection and grouping on the
/// held-out programme, and score its frames against the annotations. Pooled
/// counts are the element-wise sum over folds.
pub fn cross_validate(corpus: &[ProgrammeData], params: &PipelineParams) -> Result<CrossValReport> {
    params.validate()?;
    let ids = distinct_programme_ids(corpus);
    if ids.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "cross-validation needs at least 2 distinct programmes, got {}",
            ids.len()
        )));
    }

    let mut per_programme = Vec::with_capacity(ids.len());
    let mut pooled_counts = ConfusionCounts::default();
    for held_out in &ids {
        let training = fold_training_examples(corpus, held_out, params.label_tolerance_frames)?;
        debug_assert!(training.iter().all(|ex| ex.programme_id != *held_out));
        let fit = fit_ols(
            &training,
            params.eta_db,
            params.beta,
            params.half_width_frames,
        )?;

        let mut counts = ConfusionCounts::default();
        let mut regions = Vec::new();
        for programme in corpus.iter().filter(|p| p.programme_id == *held_out) {
            let total_frames = programme.annotations.total_frames();
            let pairs: Vec<(SilenceEvent, FeatureVector)> = programme
                .events
                .iter()
                .copied()
                .zip(programme.features.iter().copied())
                .collect();
            let accepted = classify_silences(&fit.model, &pairs);
            let anchors: Vec<usize> = accepted.iter().map(|e| e.anchor_frame).collect();
            let programme_regions = group_boundaries(&anchors, &params.grouping, total_frames);
            let predicted = regions_to_frame_labels(&programme_regions, total_frames)?;
            let truth = programme.annotations.frame_labels();
            counts.add(&confusion_counts(&predicted, &truth)?);
            regions.extend(programme_regions);
        }

        pooled_counts.add(&counts);
        let (precision, recall, f1) = precision_recall_f1(&counts);
        per_programme.push(ProgrammeOutcome {
            programme_id: held_out.clone(),
            mcc: mcc(&counts),
            precision,
            recall,
            f1,
            counts,
            regions,
            degenerate_fit: fit.report.degenerate_labels,
        });
    }

    let (pooled_precision, pooled_recall, pooled_f1) = precision_recall_f1(&pooled_counts);
    Ok(CrossValReport {
        per_programme,
        pooled_mcc: mcc(&pooled_counts),
        pooled_counts,
        pooled_precision,
        pooled_recall,
        pooled_f1,
    })
}

/// Cross-validation report as CSV: one row per programme plus a pooled row,
/// mirroring the evaluation-report layout.
pub fn crossval_csv(report: &CrossValReport) -> String {
    let mut out = String::from("programme_id,tp,tn,fp,fn,mcc,precision,recall,f1\n");
    let mut row = |id: &str, c: &ConfusionCounts, m: f64, p: f64, r: f64, f1: f64| {
        out.push_str(&format!(
            "{id},{},{},{},{},{m:.6},{p:.6},{r:.6},{f1:.6}\n",
            c.true_positives, c.true_negatives, c.false_positives, c.false_negatives
        ));
    };
    for outcome in &report.per_programme {
        row(
            &outcome.programme_id,
            &outcome.counts,
            outcome.mcc,
            outcome.precision,
            outcome.recall,
            outcome.f1,
        );
    }
    row(
        "pooled",
        &report.pooled_counts,
        report.pooled_mcc,
        report.pooled_precision,
        report.pooled_recall,
        report.pooled_f1,
    );
    out
}
