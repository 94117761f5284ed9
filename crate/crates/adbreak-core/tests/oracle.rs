//! Independent re-derivations of the numeric contracts.
//!
//! Every oracle here recomputes a quantity straight from its definition, in
//! a deliberately different style from the library code (two-pass moments,
//! full-pivot Gauss-Jordan, naive scans), and the library must agree to
//! tight tolerances on randomized instances.

use adbreak_core::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn close(actual: f64, expected: f64, tol: f64) -> bool {
    (actual - expected).abs() <= tol * (1.0 + expected.abs())
}

// ---------------------------------------------------------------- energy --

#[test]
fn test_sine_frame_energy_matches_brute_force_and_analytic_value() {
    // 400 Hz at 48 kHz: exactly 16 periods per 1920-sample frame.
    let frame: Vec<f64> = (0..FRAME_LEN_SAMPLES)
        .map(|i| 0.5 * (2.0 * std::f64::consts::PI * 400.0 * i as f64 / 48_000.0).sin())
        .collect();
    let measured = frame_energy_db(&frame);

    let rms = (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt();
    let brute_force = 20.0 * rms.log10();
    assert!((measured - brute_force).abs() < 1e-9);

    // Analytically the RMS of a full-period sine is amplitude / sqrt(2).
    let analytic = 20.0 * (0.5 / 2f64.sqrt()).log10();
    assert!((measured - analytic).abs() < 1e-3);
    assert!((analytic - -9.0309).abs() < 1e-3);
}

#[test]
fn test_gain_law_over_random_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    for _ in 0..1000 {
        let frame: Vec<f64> = (0..FRAME_LEN_SAMPLES)
            .map(|_| rng.gen_range(-0.9..0.9))
            .collect();
        let gain = rng.gen_range(0.1..10.0);
        let scaled: Vec<f64> = frame.iter().map(|x| x * gain).collect();
        let shift = 20.0 * gain.log10();
        let base = frame_energy_db(&frame);
        assert!(base > -60.0, "uniform noise frames are loud");
        let measured = frame_energy_db(&scaled);
        assert!(
            (measured - (base + shift)).abs() < 1e-9,
            "gain {gain}: {measured} vs {}",
            base + shift
        );
    }
}

// -------------------------------------------------------------- features --

fn oracle_quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p * (sorted.len() as f64 - 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Two-pass, direct-definition statistics in canonical feature order.
fn oracle_stats(values: &[f64]) -> [f64; 7] {
    let n = values.len() as f64;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let (skew, kurt) = if var < 1e-12 {
        (0.0, 0.0)
    } else {
        (m3 / var.powf(1.5), m4 / (var * var) - 3.0)
    };
    let iqr = oracle_quantile(values, 0.75) - oracle_quantile(values, 0.25);
    [max, mean, min, iqr, var.sqrt(), skew, kurt]
}

#[test]
fn test_features_match_direct_definition_oracle_on_random_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    for case in 0..500 {
        let len = match case % 5 {
            0 => 1,
            1 => rng.gen_range(2..5),
            2 => rng.gen_range(5..50),
            _ => rng.gen_range(50..=301),
        };
        let values: Vec<f64> = (0..len).map(|_| rng.gen_range(-90.0..-5.0)).collect();
        let window = ContextWindow {
            half_width_frames: 150,
            values_db: values.clone(),
        };
        let actual = extract_features(&window).unwrap().as_array();
        let expected = oracle_stats(&values);
        for (i, (a, e)) in actual.iter().zip(&expected).enumerate() {
            assert!(
                close(*a, *e, 1e-9),
                "case {case} len {len} feature {i}: {a} vs {e}"
            );
        }
    }
}

#[test]
fn test_features_of_degenerate_windows_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..50 {
        let len = rng.gen_range(1..100);
        let level = rng.gen_range(-90.0..-5.0);
        let values = vec![level; len];
        let window = ContextWindow {
            half_width_frames: 150,
            values_db: values.clone(),
        };
        let actual = extract_features(&window).unwrap().as_array();
        let expected = oracle_stats(&values);
        for (a, e) in actual.iter().zip(&expected) {
            assert!(close(*a, *e, 1e-9));
        }
        assert_eq!(actual[5], 0.0, "constant window has zero skewness");
        assert_eq!(actual[6], 0.0, "constant window has zero excess kurtosis");
    }
}

// ------------------------------------------------------------ regression --

/// Gauss-Jordan elimination with full pivoting; an intentionally different
/// algorithm from the library's partially-pivoted triangular solve.
#[allow(clippy::needless_range_loop)]
fn oracle_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    let mut var_of_col: Vec<usize> = (0..n).collect();
    for step in 0..n {
        let (mut pr, mut pc, mut best) = (step, step, -1.0);
        for r in step..n {
            for c in step..n {
                if a[r][c].abs() > best {
                    best = a[r][c].abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        assert!(best > 1e-9, "oracle hit a singular system");
        a.swap(step, pr);
        b.swap(step, pr);
        for row in a.iter_mut() {
            row.swap(step, pc);
        }
        var_of_col.swap(step, pc);
        let pivot = a[step][step];
        for c in step..n {
            a[step][c] /= pivot;
        }
        b[step] /= pivot;
        for r in 0..n {
            if r != step && a[r][step] != 0.0 {
                let factor = a[r][step];
                for c in step..n {
                    a[r][c] -= factor * a[step][c];
                }
                b[r] -= factor * b[step];
            }
        }
    }
    let mut x = vec![0.0; n];
    for (col, &var) in var_of_col.iter().enumerate() {
        x[var] = b[col];
    }
    x
}

fn oracle_normal_equations(examples: &[LabelledExample]) -> Vec<f64> {
    let rows: Vec<[f64; 8]> = examples
        .iter()
        .map(|ex| {
            let f = ex.features.as_array();
            [1.0, f[0], f[1], f[2], f[3], f[4], f[5], f[6]]
        })
        .collect();
    let mut gram = vec![vec![0.0f64; 8]; 8];
    let mut rhs = vec![0.0f64; 8];
    for (row, ex) in rows.iter().zip(examples) {
        for i in 0..8 {
            rhs[i] += row[i] * ex.label;
            for j in 0..8 {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    oracle_solve(gram, rhs)
}

fn random_features(rng: &mut ChaCha8Rng) -> FeatureVector {
    FeatureVector {
        max_db: rng.gen_range(-30.0..-10.0),
        mean_db: rng.gen_range(-45.0..-25.0),
        min_db: rng.gen_range(-90.0..-55.0),
        iqr_db: rng.gen_range(0.0..10.0),
        std_db: rng.gen_range(0.0..12.0),
        skewness: rng.gen_range(-4.0..2.0),
        kurtosis_excess: rng.gen_range(-2.0..8.0),
    }
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Vec<LabelledExample> {
    loop {
        let examples: Vec<LabelledExample> = (0..n)
            .map(|i| LabelledExample {
                programme_id: "oracle".to_string(),
                anchor_frame: i,
                features: random_features(rng),
                label: f64::from(u8::from(rng.gen_bool(0.5))),
            })
            .collect();
        let positives = examples.iter().filter(|e| e.label == 1.0).count();
        if positives > 0 && positives < n {
            return examples;
        }
    }
}

#[test]
fn test_ols_matches_full_pivot_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for case in 0..100 {
        let examples = random_instance(&mut rng, 50);
        let fit = fit_ols(&examples, -60.0, 0.25, 150).unwrap();
        assert!(
            !fit.report.used_pseudo_inverse,
            "random instances are regular"
        );
        let expected = oracle_normal_equations(&examples);
        assert!(
            close(fit.model.intercept, expected[0], 1e-8),
            "case {case} intercept {} vs {}",
            fit.model.intercept,
            expected[0]
        );
        for i in 0..7 {
            assert!(
                close(fit.model.weights[i], expected[i + 1], 1e-8),
                "case {case} weight {i}: {} vs {}",
                fit.model.weights[i],
                expected[i + 1]
            );
        }
    }
}

#[test]
fn test_ols_residual_is_orthogonal_to_design_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    for _ in 0..100 {
        let examples = random_instance(&mut rng, 50);
        let fit = fit_ols(&examples, -60.0, 0.25, 150).unwrap();
        let residuals: Vec<f64> = examples
            .iter()
            .map(|ex| ex.label - predict(&fit.model, &ex.features))
            .collect();
        for col in 0..8 {
            let column: Vec<f64> = examples
                .iter()
                .map(|ex| {
                    if col == 0 {
                        1.0
                    } else {
                        ex.features.as_array()[col - 1]
                    }
                })
                .collect();
            let norm = column.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dot: f64 = residuals.iter().zip(&column).map(|(r, c)| r * c).sum();
            assert!(
                (dot / norm).abs() < 1e-6,
                "column {col}: normalized residual dot {}",
                dot / norm
            );
        }
    }
}

#[test]
fn test_ols_recovers_exact_linear_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(406);
    let examples: Vec<LabelledExample> = (0..50)
        .map(|i| {
            let features = random_features(&mut rng);
            LabelledExample {
                programme_id: "exact".to_string(),
                anchor_frame: i,
                features,
                label: 0.3 * features.mean_db + 0.1,
            }
        })
        .collect();
    let fit = fit_ols(&examples, -60.0, 0.25, 150).unwrap();
    assert!((fit.model.intercept - 0.1).abs() < 1e-8);
    let expected = [0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0];
    for (i, (w, e)) in fit.model.weights.iter().zip(&expected).enumerate() {
        assert!((w - e).abs() < 1e-8, "weight {i}: {w} vs {e}");
    }
    assert!(fit.report.residual_norm < 1e-8);
}

// ---------------------------------------------------- silences & grouping --

#[test]
fn test_silence_detection_matches_naive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(407);
    for _ in 0..50 {
        let n = rng.gen_range(1..400);
        let energies: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..-10.0)).collect();
        let eta = rng.gen_range(-80.0..-30.0);
        let track = EnergyTrack::from_energies(energies.clone(), FRAME_LEN_SAMPLES);
        let expected: Vec<usize> = (0..n).filter(|&i| energies[i] <= eta).collect();
        assert_eq!(detect_silence_frames(&track, eta), expected);
    }
}

#[test]
fn test_merge_matches_naive_run_grouping() {
    let mut rng = ChaCha8Rng::seed_from_u64(408);
    for _ in 0..100 {
        let n = 300;
        let energies: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..-10.0)).collect();
        let indices: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
        let track = EnergyTrack::from_energies(energies.clone(), FRAME_LEN_SAMPLES);
        let events = merge_silence_events(&indices, &track).unwrap();

        // Naive oracle: group consecutive runs, then pick the earliest
        // minimum within each run.
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &i in &indices {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == i => *end = i,
                _ => runs.push((i, i)),
            }
        }
        assert_eq!(events.len(), runs.len());
        for (event, (start, end)) in events.iter().zip(&runs) {
            assert_eq!((event.start_frame, event.end_frame), (*start, *end));
            let mut best = *start;
            for frame in *start..=*end {
                if energies[frame] < energies[best] {
                    best = frame;
                }
            }
            assert_eq!(event.anchor_frame, best);
            assert_eq!(event.min_energy_db, energies[best]);
        }
    }
}

fn random_anchors(rng: &mut ChaCha8Rng, max_frame: usize) -> Vec<usize> {
    let count = rng.gen_range(0..30);
    let mut anchors: Vec<usize> = (0..count).map(|_| rng.gen_range(0..max_frame)).collect();
    anchors.sort_unstable();
    anchors.dedup();
    anchors
}

#[test]
fn test_grouping_matches_independent_chain_builder() {
    let mut rng = ChaCha8Rng::seed_from_u64(409);
    for _ in 0..200 {
        let total = 30_000;
        let anchors = random_anchors(&mut rng, total);
        let params = GroupingParams {
            window_frames: rng.gen_range(1..6000),
            min_region_frames: rng.gen_range(1..3000),
            min_silences: rng.gen_range(2..5),
            edge_offset_frames: 0,
        };
        let actual = group_boundaries(&anchors, &params, total);

        // Oracle: materialize the chains first, filter second.
        let mut chains: Vec<Vec<usize>> = Vec::new();
        for &a in &anchors {
            match chains.last_mut() {
                Some(chain) if a - *chain.last().unwrap() <= params.window_frames => chain.push(a),
                _ => chains.push(vec![a]),
            }
        }
        let expected: Vec<(usize, usize, usize)> = chains
            .iter()
            .filter(|c| {
                c.len() >= params.min_silences
                    && c.last().unwrap() - c[0] + 1 >= params.min_region_frames
            })
            .map(|c| (c[0], *c.last().unwrap(), c.len()))
            .collect();

        let actual_tuples: Vec<(usize, usize, usize)> = actual
            .iter()
            .map(|r| (r.start_frame, r.end_frame, r.silence_count))
            .collect();
        assert_eq!(actual_tuples, expected);
    }
}

#[test]
fn test_frame_labels_match_span_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(410);
    for _ in 0..100 {
        let total = 10_000;
        // Build sorted disjoint regions left to right.
        let mut regions = Vec::new();
        let mut cursor = 0usize;
        while cursor + 100 < total && rng.gen_bool(0.7) {
            let start = cursor + rng.gen_range(1..50);
            let end = start + rng.gen_range(0..2000).min(total - start - 1);
            regions.push(AdRegion {
                start_frame: start,
                end_frame: end,
                silence_count: 2,
            });
            cursor = end + 1;
        }
        let labels = regions_to_frame_labels(&regions, total).unwrap();
        assert_eq!(labels.len(), total);
        let ones = labels.iter().filter(|&&l| l).count();
        let span_sum: usize = regions
            .iter()
            .map(|r| r.end_frame - r.start_frame + 1)
            .sum();
        assert_eq!(ones, span_sum);
    }
}

// -------------------------------------------------------------------- mcc --

#[test]
fn test_mcc_matches_naive_formula_on_random_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(411);
    let mut checked = 0;
    while checked < 1000 {
        let c = ConfusionCounts {
            true_positives: rng.gen_range(0..100_000),
            true_negatives: rng.gen_range(0..100_000),
            false_positives: rng.gen_range(0..100_000),
            false_negatives: rng.gen_range(0..100_000),
        };
        let tp = c.true_positives as f64;
        let tn = c.true_negatives as f64;
        let fp = c.false_positives as f64;
        let fn_ = c.false_negatives as f64;
        let den = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt();
        if den == 0.0 {
            continue;
        }
        let naive = (tp * tn - fp * fn_) / den;
        assert!((mcc(&c) - naive).abs() < 1e-12);
        checked += 1;
    }
}
