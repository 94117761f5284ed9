//! Subcommand implementations and their argument structs.
//!
//! Every output file is deterministic: identical invocations on identical
//! inputs produce byte-identical files (no timestamps, stable field orders,
//! fixed float formatting).

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use adbreak_core::*;

/// Command outcome; the crate-wide `Result` alias from the glob import
/// covers core errors only.
type CmdResult<T> = std::result::Result<T, Failure>;

/// A command failure carrying the process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::InsufficientData(_) => 3,
            Error::Internal(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

/// Map a core error to a failure, prefixing the file it came from. I/O
/// errors from the core already carry the path, so skip the prefix when the
/// message names it.
fn file_context(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |err| {
        let mut failure = Failure::from(err);
        let shown = path.display().to_string();
        if !failure.message.contains(&shown) {
            failure.message = format!("{shown}: {}", failure.message);
        }
        failure
    }
}

fn ensure_dir(path: &Path) -> CmdResult<()> {
    fs::create_dir_all(path)
        .map_err(|e| input_error(format!("cannot create {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CmdResult<()> {
    fs::write(path, contents)
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn to_pretty_json<T: Serialize>(value: &T) -> CmdResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure {
            code: 4,
            message: format!("cannot serialize output: {e}"),
        })
}

fn warn_sample_rate(signal: &AudioSignal, path: &Path) {
    if signal.sample_rate_hz != EXPECTED_SAMPLE_RATE_HZ {
        eprintln!(
            "warning: {} is sampled at {} Hz; frame timings assume {} Hz (25 frames/s)",
            path.display(),
            signal.sample_rate_hz,
            EXPECTED_SAMPLE_RATE_HZ
        );
    }
}

// -------------------------------------------------------------- arguments --

/// Analysis-parameter overrides shared by the audio-processing subcommands.
/// Unset flags fall back to the model file (for detect) or the defaults.
#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Silence threshold in dB (default -60).
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Regression decision threshold (default 0.25).
    #[arg(long)]
    beta: Option<f64>,
    /// Context half-width around each silence, in frames (default 150).
    #[arg(long = "half-width")]
    half_width: Option<usize>,
    /// Grouping window in frames (default 3750, i.e. 150 s).
    #[arg(long)]
    window: Option<usize>,
    /// Minimum region span in frames (default 1500, i.e. 60 s).
    #[arg(long = "min-region")]
    min_region: Option<usize>,
    /// Offset added to both region edges, in frames (default 0).
    #[arg(long = "edge-offset", allow_negative_numbers = true)]
    edge_offset: Option<i64>,
    /// Tolerance for matching annotation boundaries to silence events, in
    /// frames (default 12).
    #[arg(long = "label-tolerance")]
    label_tolerance: Option<usize>,
}

impl ParamArgs {
    fn apply(&self, mut params: PipelineParams) -> CmdResult<PipelineParams> {
        if let Some(eta) = self.eta {
            params.eta_db = eta;
        }
        if let Some(beta) = self.beta {
            params.beta = beta;
        }
        if let Some(half_width) = self.half_width {
            params.half_width_frames = half_width;
        }
        if let Some(window) = self.window {
            params.grouping.window_frames = window;
        }
        if let Some(min_region) = self.min_region {
            params.grouping.min_region_frames = min_region;
        }
        if let Some(edge_offset) = self.edge_offset {
            params.grouping.edge_offset_frames = edge_offset;
        }
        if let Some(tolerance) = self.label_tolerance {
            params.label_tolerance_frames = tolerance;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
pub struct DetectArgs {
    /// Input WAV file (integer PCM, 16/24/32-bit, mono or stereo).
    #[arg(long)]
    wav: PathBuf,
    /// Trained model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Also write the energy track and per-silence scores.
    #[arg(long)]
    export: bool,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Corpus manifest CSV: programme_id,wav_path,annotation_path
    /// (paths relative to the manifest).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
pub struct CrossvalArgs {
    /// Corpus manifest CSV: programme_id,wav_path,annotation_path
    /// (paths relative to the manifest).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Detected regions CSV (as written by `adbreak detect`).
    #[arg(long)]
    regions: PathBuf,
    /// Ground-truth annotation CSV.
    #[arg(long)]
    annotations: PathBuf,
    /// Total frame count of the recording the regions refer to.
    #[arg(long)]
    frames: usize,
    /// Row label used in the report.
    #[arg(long, default_value = "recording")]
    id: String,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Synthesis config JSON for a single programme.
    #[arg(long, conflicts_with_all = ["corpus", "seed"])]
    config: Option<PathBuf>,
    /// Generate this many programmes with the built-in broadcast profile.
    #[arg(long)]
    corpus: Option<usize>,
    /// Base seed for --corpus.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct ExportEnergyArgs {
    /// Input WAV file.
    #[arg(long)]
    wav: PathBuf,
    /// Silence threshold in dB used for the is_silence column (default -60).
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

// --------------------------------------------------------------- manifest --

struct ManifestEntry {
    programme_id: String,
    wav_path: PathBuf,
    annotation_path: PathBuf,
}

const MANIFEST_HEADER: &str = "programme_id,wav_path,annotation_path";

fn parse_manifest(path: &Path) -> CmdResult<Vec<ManifestEntry>> {
    let text = read_file(path)?;
    let base = match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => parent,
        _ => Path::new("."),
    };
    let mut entries = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == MANIFEST_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(input_error(format!(
                "manifest line {}: expected {MANIFEST_HEADER}",
                number + 1
            )));
        }
        let id = fields[0].trim();
        let id_ok = !id.is_empty()
            && id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !id_ok {
            return Err(input_error(format!(
                "manifest line {}: programme id {id:?} must use only letters, digits, '-', '_'",
                number + 1
            )));
        }
        entries.push(ManifestEntry {
            programme_id: id.to_string(),
            wav_path: base.join(fields[1].trim()),
            annotation_path: base.join(fields[2].trim()),
        });
    }
    if entries.is_empty() {
        return Err(input_error(format!(
            "manifest {} contains no entries",
            path.display()
        )));
    }
    Ok(entries)
}

fn load_programme(entry: &ManifestEntry, params: &PipelineParams) -> CmdResult<ProgrammeData> {
    let signal = decode_wav(&entry.wav_path).map_err(file_context(&entry.wav_path))?;
    warn_sample_rate(&signal, &entry.wav_path);
    let analysis = analyze(signal, params)?;
    let annotations = parse_annotations(&entry.annotation_path, analysis.total_frames())
        .map_err(file_context(&entry.annotation_path))?;
    Ok(ProgrammeData::from_analysis(
        &entry.programme_id,
        &analysis,
        annotations,
    )?)
}

fn load_corpus(manifest: &Path, params: &PipelineParams) -> CmdResult<Vec<ProgrammeData>> {
    parse_manifest(manifest)?
        .iter()
        .map(|entry| load_programme(entry, params))
        .collect()
}

// ----------------------------------------------------------------- detect --

#[derive(Serialize)]
struct DetectEcho<'a> {
    command: &'a str,
    wav: String,
    model: String,
    sample_rate_hz: u32,
    total_frames: usize,
    silence_events: usize,
    accepted_silences: usize,
    regions: usize,
    params: &'a PipelineParams,
}

fn scores_csv(outcome: &DetectionOutcome, beta: f64) -> String {
    let mut out = String::from("anchor_frame,start_frame,end_frame,min_energy_db,score,accepted\n");
    for (event, score) in outcome.analysis.events.iter().zip(&outcome.scores) {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{}\n",
            event.anchor_frame,
            event.start_frame,
            event.end_frame,
            event.min_energy_db,
            score,
            i32::from(*score > beta)
        ));
    }
    out
}

pub fn run_detect(args: DetectArgs) -> CmdResult<()> {
    let model = load_model(&args.model).map_err(file_context(&args.model))?;
    let params = args.params.apply(PipelineParams::from_model(&model))?;
    let signal = decode_wav(&args.wav).map_err(file_context(&args.wav))?;
    warn_sample_rate(&signal, &args.wav);
    let sample_rate_hz = signal.sample_rate_hz;
    let outcome = detect_pipeline(signal, &model, &params)?;

    ensure_dir(&args.out)?;
    write_file(
        &args.out.join("regions.csv"),
        &regions_csv(&outcome.regions, &params.grouping),
    )?;
    let echo = DetectEcho {
        command: "detect",
        wav: args.wav.display().to_string(),
        model: args.model.display().to_string(),
        sample_rate_hz,
        total_frames: outcome.analysis.total_frames(),
        silence_events: outcome.analysis.events.len(),
        accepted_silences: outcome.accepted.len(),
        regions: outcome.regions.len(),
        params: &params,
    };
    write_file(&args.out.join("params.json"), &to_pretty_json(&echo)?)?;
    if args.export {
        write_file(
            &args.out.join("energy.csv"),
            &energy_csv(&outcome.analysis.track, params.eta_db),
        )?;
        write_file(
            &args.out.join("scores.csv"),
            &scores_csv(&outcome, params.beta),
        )?;
    }
    println!(
        "{} advertising region(s) in {} frames ({} silences, {} accepted)",
        outcome.regions.len(),
        outcome.analysis.total_frames(),
        outcome.analysis.events.len(),
        outcome.accepted.len()
    );
    Ok(())
}

// ------------------------------------------------------------------ train --

fn training_report(fit: &FitResult, params: &PipelineParams, programmes: usize) -> String {
    let report = &fit.report;
    format!(
        "examples={}\npositives={}\nnegatives={}\nprogrammes={programmes}\n\
         degenerate_labels={}\nused_pseudo_inverse={}\nresidual_norm={:.6}\n\
         eta_db={}\nbeta={}\nhalf_width_frames={}\nlabel_tolerance_frames={}\n",
        report.examples,
        report.positives,
        report.negatives,
        report.degenerate_labels,
        report.used_pseudo_inverse,
        report.residual_norm,
        params.eta_db,
        params.beta,
        params.half_width_frames,
        params.label_tolerance_frames
    )
}

pub fn run_train(args: TrainArgs) -> CmdResult<()> {
    let params = args.params.apply(PipelineParams::default())?;
    let corpus = load_corpus(&args.manifest, &params)?;
    ensure_dir(&args.out)?;

    for programme in &corpus {
        let examples = programme.labelled_examples(params.label_tolerance_frames)?;
        let rows: Vec<(usize, FeatureVector, f64)> = examples
            .iter()
            .map(|ex| (ex.anchor_frame, ex.features, ex.label))
            .collect();
        write_file(
            &args
                .out
                .join(format!("features_{}.csv", programme.programme_id)),
            &features_csv(&rows),
        )?;
    }

    let fit = train_model(&corpus, &params)?;
    save_model(&fit.model, &args.out.join("model.json"))?;
    write_file(
        &args.out.join("training_report.txt"),
        &training_report(&fit, &params, corpus.len()),
    )?;
    if fit.report.degenerate_labels {
        eprintln!(
            "warning: all {} training labels are identical; the model is a constant predictor",
            fit.report.examples
        );
    }
    println!(
        "trained on {} examples ({} positive) from {} programme(s)",
        fit.report.examples,
        fit.report.positives,
        corpus.len()
    );
    Ok(())
}

// --------------------------------------------------------------- crossval --

#[derive(Serialize)]
struct CrossvalEcho<'a> {
    command: &'a str,
    manifest: String,
    programmes: usize,
    params: &'a PipelineParams,
}

pub fn run_crossval(args: CrossvalArgs) -> CmdResult<()> {
    let params = args.params.apply(PipelineParams::default())?;
    let corpus = load_corpus(&args.manifest, &params)?;
    let report = cross_validate(&corpus, &params)?;

    ensure_dir(&args.out)?;
    write_file(
        &args.out.join("crossval_report.csv"),
        &crossval_csv(&report),
    )?;
    let echo = CrossvalEcho {
        command: "crossval",
        manifest: args.manifest.display().to_string(),
        programmes: report.per_programme.len(),
        params: &params,
    };
    write_file(&args.out.join("params.json"), &to_pretty_json(&echo)?)?;
    for outcome in &report.per_programme {
        println!(
            "{}: mcc={:.6} tp={} tn={} fp={} fn={}",
            outcome.programme_id,
            outcome.mcc,
            outcome.counts.true_positives,
            outcome.counts.true_negatives,
            outcome.counts.false_positives,
            outcome.counts.false_negatives
        );
    }
    println!("pooled: mcc={:.6}", report.pooled_mcc);
    Ok(())
}

// --------------------------------------------------------------- evaluate --

pub fn run_evaluate(args: EvaluateArgs) -> CmdResult<()> {
    let regions =
        parse_regions_csv(&read_file(&args.regions)?).map_err(file_context(&args.regions))?;
    let annotations = parse_annotations(&args.annotations, args.frames)
        .map_err(file_context(&args.annotations))?;
    let predicted = regions_to_frame_labels(&regions, args.frames)?;
    let truth = annotations.frame_labels();
    let counts = confusion_counts(&predicted, &truth)?;
    let m = mcc(&counts);
    let (precision, recall, f1) = precision_recall_f1(&counts);

    let mut csv = String::from("programme_id,tp,tn,fp,fn,mcc,precision,recall,f1\n");
    for label in [args.id.as_str(), "pooled"] {
        csv.push_str(&format!(
            "{label},{},{},{},{},{m:.6},{precision:.6},{recall:.6},{f1:.6}\n",
            counts.true_positives,
            counts.true_negatives,
            counts.false_positives,
            counts.false_negatives
        ));
    }
    ensure_dir(&args.out)?;
    write_file(&args.out.join("evaluation_report.csv"), &csv)?;
    println!(
        "{}: mcc={m:.6} precision={precision:.6} recall={recall:.6} f1={f1:.6}",
        args.id
    );
    Ok(())
}

// ------------------------------------------------------------------ synth --

pub fn run_synth(args: SynthArgs) -> CmdResult<()> {
    let configs: Vec<(String, SynthConfig)> = match (&args.config, args.corpus) {
        (Some(path), None) => {
            let config: SynthConfig = serde_json::from_str(&read_file(path)?)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            vec![("programme".to_string(), config)]
        }
        (None, Some(count)) => {
            if count == 0 {
                return Err(input_error("--corpus must be at least 1".into()));
            }
            default_corpus(args.seed, count)
                .into_iter()
                .enumerate()
                .map(|(i, config)| (format!("programme_{i:02}"), config))
                .collect()
        }
        _ => {
            return Err(input_error(
                "exactly one of --config or --corpus is required".into(),
            ))
        }
    };

    ensure_dir(&args.out)?;
    let mut manifest = String::from(MANIFEST_HEADER);
    manifest.push('\n');
    for (id, config) in &configs {
        let (signal, annotations) = generate(config)?;
        let wav_name = format!("{id}.wav");
        let annotation_name = format!("{id}_annotations.csv");
        write_wav(&signal, &args.out.join(&wav_name), 24)?;
        write_file(
            &args.out.join(&annotation_name),
            &annotations_csv(&annotations),
        )?;
        write_file(
            &args.out.join(format!("{id}_config.json")),
            &to_pretty_json(config)?,
        )?;
        manifest.push_str(&format!("{id},{wav_name},{annotation_name}\n"));
        println!(
            "{id}: {:.1} s, {} ad block(s), {} boundaries",
            signal.duration_seconds(),
            annotations.ad_blocks().len(),
            annotations.commercial_boundaries().len()
        );
    }
    write_file(&args.out.join("manifest.csv"), &manifest)?;
    Ok(())
}

// ---------------------------------------------------------- export-energy --

pub fn run_export_energy(args: ExportEnergyArgs) -> CmdResult<()> {
    let eta = args.eta.unwrap_or(DEFAULT_ETA_DB);
    let signal = decode_wav(&args.wav).map_err(file_context(&args.wav))?;
    warn_sample_rate(&signal, &args.wav);
    let mono = downmix_to_mono(signal)?;
    let frames = frame_signal(mono, FRAME_LEN_SAMPLES)?;
    let track = energy_track(&frames)?;
    ensure_dir(&args.out)?;
    write_file(&args.out.join("energy.csv"), &energy_csv(&track, eta))?;
    println!("{} frames written", track.len());
    Ok(())
}
