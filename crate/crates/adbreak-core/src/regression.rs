//! Linear-probability scoring of candidate boundary silences.
//!
//! Candidate silences are labelled 1 (true commercial boundary) or 0 and a
//! linear regression is fitted over the seven window statistics by ordinary
//! least squares. At detection time a silence is retained only when its
//! predicted value exceeds the decision threshold beta; scores are *not*
//! clamped to [0, 1].
//!
//! The normal equations are solved by Gaussian elimination with partial
//! pivoting; if the Gram matrix is singular beyond tolerance the solver
//! falls back to a minimum-norm pseudo-inverse built from a Jacobi
//! eigendecomposition (the Gram matrix is symmetric).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::SilenceEvent;
use crate::error::{Error, Result};
use crate::evaluation::AnnotationTrack;
use crate::features::FeatureVector;

/// Default decision threshold (beta). Retention is strict: a score exactly
/// at beta is rejected.
pub const DEFAULT_BETA: f64 = 0.25;

/// Current on-disk model format version.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Identifier for the statistic conventions baked into a model, recorded so
/// a model cannot silently be applied to features computed differently.
pub const STAT_CONVENTIONS: &str =
    "population-moments;excess-kurtosis;quantile-linear-interpolation";

/// A pivot (relative to the largest Gram diagonal entry) below this counts
/// as singular and routes the solve through the pseudo-inverse.
pub const SINGULARITY_TOLERANCE: f64 = 1e-10;

/// Minimum number of training examples: one more than the number of fitted
/// coefficients (7 weights + intercept).
pub const MIN_TRAINING_EXAMPLES: usize = FeatureVector::DIM + 2;

/// Design-matrix width: intercept column plus the seven features.
const DIM: usize = FeatureVector::DIM + 1;

type Matrix = [[f64; DIM]; DIM];
type Vector = [f64; DIM];

/// A fitted boundary-silence classifier together with the analysis
/// parameters it was trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub format_version: u32,
    /// Weights in canonical feature order: max, mean, min, IQR, std,
    /// skewness, excess kurtosis.
    pub weights: [f64; 7],
    pub intercept: f64,
    /// Decision threshold; scores must strictly exceed it.
    pub beta: f64,
    /// Silence threshold in dB the training features were extracted under.
    pub eta: f64,
    /// Context half-width in frames the features were extracted under.
    pub half_width_frames: usize,
    pub stat_conventions: String,
}

impl Default for RegressionModel {
    /// A constant-zero model at the default operating point. Useful as a
    /// starting point for building models by hand; it scores every silence
    /// 0.0 and therefore rejects everything.
    fn default() -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            weights: [0.0; 7],
            intercept: 0.0,
            beta: DEFAULT_BETA,
            eta: crate::energy::DEFAULT_ETA_DB,
            half_width_frames: crate::features::DEFAULT_HALF_WIDTH_FRAMES,
            stat_conventions: STAT_CONVENTIONS.to_string(),
        }
    }
}

impl RegressionModel {
    pub fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format_version {} (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            )));
        }
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::ModelFormat(format!("weight {i} is not finite")));
            }
        }
        if !self.intercept.is_finite() {
            return Err(Error::ModelFormat("intercept is not finite".into()));
        }
        if !self.beta.is_finite() || self.beta <= 0.0 || self.beta >= 1.0 {
            return Err(Error::ModelFormat(format!(
                "beta {} outside (0, 1)",
                self.beta
            )));
        }
        if !self.eta.is_finite() || self.eta >= 0.0 {
            return Err(Error::ModelFormat(format!(
                "eta {} must be a negative dB value",
                self.eta
            )));
        }
        if self.half_width_frames == 0 {
            return Err(Error::ModelFormat(
                "half_width_frames must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One training example: the features of a detected silence plus its label.
#[derive(Debug, Clone)]
pub struct LabelledExample {
    pub programme_id: String,
    pub anchor_frame: usize,
    pub features: FeatureVector,
    /// 1.0 for a true commercial boundary, 0.0 otherwise.
    pub label: f64,
}

/// Diagnostics from a fit.
#[derive(Debug, Clone)]
pub struct FitReport {
    pub examples: usize,
    pub positives: usize,
    pub negatives: usize,
    pub residual_norm: f64,
    /// All labels were identical; the model is a constant predictor.
    pub degenerate_labels: bool,
    /// The Gram matrix was singular and the pseudo-inverse path was used.
    pub used_pseudo_inverse: bool,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: RegressionModel,
    pub report: FitReport,
}

fn design_row(features: &FeatureVector) -> Vector {
    let f = features.as_array();
    [1.0, f[0], f[1], f[2], f[3], f[4], f[5], f[6]]
}

/// Fit the linear probability model by ordinary least squares.
///
/// `eta_db`, `beta`, and `half_width_frames` are recorded in the returned
/// model so detection can reproduce the training-time analysis settings.
/// Fails with `InsufficientData` when fewer than [`MIN_TRAINING_EXAMPLES`]
/// examples are supplied. Identical labels everywhere are allowed but
/// flagged in the report.
pub fn fit_ols(
    examples: &[LabelledExample],
    eta_db: f64,
    beta: f64,
    half_width_frames: usize,
) -> Result<FitResult> {
    if examples.len() < MIN_TRAINING_EXAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} training examples, need at least {MIN_TRAINING_EXAMPLES}",
            examples.len()
        )));
    }
    for ex in examples {
        if !ex.features.as_array().iter().all(|v| v.is_finite()) || !ex.label.is_finite() {
            return Err(Error::Internal(format!(
                "non-finite training example at anchor {} of programme {}",
                ex.anchor_frame, ex.programme_id
            )));
        }
    }

    let positives = examples.iter().filter(|e| e.label > 0.5).count();
    let negatives = examples.len() - positives;
    let degenerate_labels = examples.iter().all(|e| e.label == examples[0].label);

    // Single-class labels: the constant predictor is already the exact
    // least-squares optimum (zero residual), so pin it rather than letting
    // the solver pick an equivalent solution with spread-out weights.
    let (solution, used_pseudo_inverse) = if degenerate_labels {
        let mut constant = [0.0; DIM];
        constant[0] = examples[0].label;
        (constant, false)
    } else {
        // Accumulate the normal equations: gram = X'X, rhs = X'y.
        let mut gram = [[0.0; DIM]; DIM];
        let mut rhs = [0.0; DIM];
        for ex in examples {
            let row = design_row(&ex.features);
            for i in 0..DIM {
                rhs[i] += row[i] * ex.label;
                for j in 0..DIM {
                    gram[i][j] += row[i] * row[j];
                }
            }
        }

        let scale = gram
            .iter()
            .enumerate()
            .map(|(i, row)| row[i].abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        match solve_gaussian(gram, rhs, SINGULARITY_TOLERANCE * scale) {
            Some(w) => (w, false),
            None => (solve_pseudo_inverse(&gram, &rhs), true),
        }
    };

    let mut residual_sq = 0.0;
    for ex in examples {
        let row = design_row(&ex.features);
        let predicted: f64 = row.iter().zip(&solution).map(|(a, b)| a * b).sum();
        residual_sq += (ex.label - predicted) * (ex.label - predicted);
    }

    let mut weights = [0.0; 7];
    weights.copy_from_slice(&solution[1..]);
    let model = RegressionModel {
        format_version: MODEL_FORMAT_VERSION,
        weights,
        intercept: solution[0],
        beta,
        eta: eta_db,
        half_width_frames,
        stat_conventions: STAT_CONVENTIONS.to_string(),
    };
    model.validate()?;
    Ok(FitResult {
        model,
        report: FitReport {
            examples: examples.len(),
            positives,
            negatives,
            residual_norm: residual_sq.sqrt(),
            degenerate_labels,
            used_pseudo_inverse,
        },
    })
}

/// Gaussian elimination with partial pivoting. Returns `None` when a pivot
/// falls below `pivot_floor`, signalling a singular system.
#[allow(clippy::needless_range_loop)] // textbook elimination reads clearest indexed
fn solve_gaussian(mut a: Matrix, mut b: Vector, pivot_floor: f64) -> Option<Vector> {
    for col in 0..DIM {
        let pivot_row = (col..DIM)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= pivot_floor {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..DIM {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..DIM {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; DIM];
    for row in (0..DIM).rev() {
        let mut acc = b[row];
        for k in row + 1..DIM {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimum-norm solution of `a x = b` for symmetric positive semi-definite
/// `a`, via the eigendecomposition pseudo-inverse. Eigenvalues below
/// `SINGULARITY_TOLERANCE` of the largest magnitude are treated as zero.
fn solve_pseudo_inverse(a: &Matrix, b: &Vector) -> Vector {
    let (values, vectors) = jacobi_eigen(*a);
    let cutoff = SINGULARITY_TOLERANCE
        * values
            .iter()
            .map(|v| v.abs())
            .fold(0.0f64, f64::max)
            .max(1e-300);
    let mut x = [0.0; DIM];
    for k in 0..DIM {
        if values[k].abs() <= cutoff {
            continue;
        }
        let mut projection = 0.0;
        for i in 0..DIM {
            projection += vectors[i][k] * b[i];
        }
        projection /= values[k];
        for i in 0..DIM {
            x[i] += projection * vectors[i][k];
        }
    }
    x
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues and the matrix whose columns are the eigenvectors.
#[allow(clippy::needless_range_loop)] // row/column rotations read clearest indexed
fn jacobi_eigen(mut a: Matrix) -> (Vector, Matrix) {
    let mut v = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        v[i][i] = 1.0;
    }
    let total: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..64 {
        let off: f64 = (0..DIM)
            .flat_map(|i| (0..DIM).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= total * 1e-28 {
            break;
        }
        for p in 0..DIM - 1 {
            for q in p + 1..DIM {
                if a[p][q].abs() <= total.sqrt() * 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..DIM {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..DIM {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for i in 0..DIM {
                    let vip = v[i][p];
                    let viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut values = [0.0; DIM];
    for i in 0..DIM {
        values[i] = a[i][i];
    }
    (values, v)
}

/// Predicted regression value for one feature vector. Unbounded; callers
/// compare it against beta.
pub fn predict(model: &RegressionModel, features: &FeatureVector) -> f64 {
    let f = features.as_array();
    let weighted: f64 = model.weights.iter().zip(f.iter()).map(|(w, x)| w * x).sum();
    model.intercept + weighted
}

/// Keep only the silences whose score strictly exceeds the model's beta.
/// Input order is preserved; a score exactly at beta is rejected.
pub fn classify_silences(
    model: &RegressionModel,
    events: &[(SilenceEvent, FeatureVector)],
) -> Vec<SilenceEvent> {
    events
        .iter()
        .filter(|(_, features)| predict(model, features) > model.beta)
        .map(|(event, _)| *event)
        .collect()
}

/// Label silence events against level-2 boundary annotations: an event gets
/// label 1 iff some annotated boundary frame lies within
/// `[start_frame - tolerance, end_frame + tolerance]`.
pub fn label_events(
    events: &[SilenceEvent],
    features: &[FeatureVector],
    annotations: &AnnotationTrack,
    tolerance_frames: usize,
    programme_id: &str,
) -> Result<Vec<LabelledExample>> {
    if events.len() != features.len() {
        return Err(Error::Internal(format!(
            "{} events but {} feature vectors for programme {programme_id}",
            events.len(),
            features.len()
        )));
    }
    let boundaries = annotations.commercial_boundaries();
    let labelled = events
        .iter()
        .zip(features)
        .map(|(event, feat)| {
            let lo = event.start_frame.saturating_sub(tolerance_frames);
            let hi = event.end_frame + tolerance_frames;
            // boundaries is sorted; find the first boundary >= lo.
            let idx = boundaries.partition_point(|&b| b < lo);
            let hit = boundaries.get(idx).is_some_and(|&b| b <= hi);
            LabelledExample {
                programme_id: programme_id.to_string(),
                anchor_frame: event.anchor_frame,
                features: *feat,
                label: f64::from(u8::from(hit)),
            }
        })
        .collect();
    Ok(labelled)
}

/// Serialize a model to its canonical JSON document.
pub fn model_to_json(model: &RegressionModel) -> Result<String> {
    model.validate()?;
    let mut text =
        serde_json::to_string_pretty(model).map_err(|e| Error::ModelFormat(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parse and validate a model from its JSON document.
pub fn model_from_json(text: &str) -> Result<RegressionModel> {
    let model: RegressionModel =
        serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
    model.validate()?;
    Ok(model)
}

/// Write a model file. The encoding round-trips every f64 bit-exactly.
pub fn save_model(model: &RegressionModel, path: &Path) -> Result<()> {
    let text = model_to_json(model)?;
    fs::write(path, text)
        .map_err(|e| Error::ModelFormat(format!("cannot write {}: {e}", path.display())))
}

/// Read and validate a model file.
pub fn load_model(path: &Path) -> Result<RegressionModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::ModelFormat(format!("cannot read {}: {e}", path.display())))?;
    model_from_json(&text)
}
