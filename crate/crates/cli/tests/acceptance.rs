//! Acceptance suite. Each test covers one release criterion at its stated
//! tolerance and prints a PASS line (run with `-- --nocapture` to see them):
//!
//! 1. simulator matches the dense Kronecker oracle (1e-12) with norm and
//!    isometry preservation (1e-10) over 500 random instances in < 10 s;
//! 2. all hybrid-model gradients match central finite differences (rel
//!    error < 1e-4 at h = 1e-5) over 100 random tiny models in < 60 s;
//! 3. cotangent norms survive the unitary circuit portion within 1e-10;
//! 4. the RG score equals brute-force pairwise AUC (1e-12) on 200 random
//!    binary instances in < 5 s;
//! 5. metric identities hold across randomized suites with zero failures;
//! 6. the desk-scale cross-validated experiment reaches F1-macro ≥ 0.90 for
//!    the quantum and MLP models with well-formed curves in < 5 min;
//! 7. full-width parameter counts are exactly 262,713 (QML) and 264,195
//!    (MLP);
//! 8. repeated full runs are byte-identical;
//! 9. (optional, not gating) reproduction of reference results on
//!    user-supplied real features.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::Instant;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vqsafe_core::eval::{run_experiment, CurveConfig};
use vqsafe_core::metrics::{
    curve_area, cvm_divergence, gini_index, rg_score, ScorePair,
};
use vqsafe_core::model::{cross_entropy, ModelKind, TrainedModel};
use vqsafe_core::quantum::{
    adjoint_transport, strongly_entangling_layer, CircuitLayout, RotationParams,
    StateVector,
};
use vqsafe_core::synthetic::{generate_synthetic, SyntheticSpec};
use vqsafe_core::train::{init_model, TrainConfig};

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = complex_norm(&amps);
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(n, amps)
}

fn random_angles(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n * 3).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

#[test]
fn criterion_1_simulator_matches_dense_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut max_err: f64 = 0.0;
    let mut max_norm_drift: f64 = 0.0;
    let mut max_isometry_drift: f64 = 0.0;
    for trial in 0..500 {
        let n = trial % 4 + 1;
        let angles = random_angles(n, &mut rng);
        let params = RotationParams::new(n, angles.clone()).unwrap();
        let layout = CircuitLayout::ring(n);
        let psi = random_state(n, &mut rng);
        let phi = random_state(n, &mut rng);

        let fast_psi = strongly_entangling_layer(&psi, &params, &layout).unwrap();
        let fast_phi = strongly_entangling_layer(&phi, &params, &layout).unwrap();
        let dense = mat_vec(&layer_unitary(n, &angles, 1), psi.amplitudes());

        max_err = max_err.max(complex_dist(fast_psi.amplitudes(), &dense));
        max_norm_drift = max_norm_drift.max((fast_psi.norm() - 1.0).abs());
        let before = complex_dist(psi.amplitudes(), phi.amplitudes());
        let after = complex_dist(fast_psi.amplitudes(), fast_phi.amplitudes());
        max_isometry_drift = max_isometry_drift.max((before - after).abs());
    }
    let elapsed = start.elapsed();
    let ok = max_err < 1e-12
        && max_norm_drift < 1e-10
        && max_isometry_drift < 1e-10
        && elapsed.as_secs_f64() < 10.0;
    println!(
        "acceptance criterion 1 (simulator vs dense oracle: err {:.2e}, norm {:.2e}, isometry {:.2e}, {:.2}s): {}",
        max_err,
        max_norm_drift,
        max_isometry_drift,
        elapsed.as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_2_gradient_fidelity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let h = 1e-5;
    let mut checked = 0usize;
    for _ in 0..100 {
        let d = rng.random_range(2..=8usize);
        let n_classes = rng.random_range(2..=3usize);
        let TrainedModel::Qml(mut model) = init_model(ModelKind::Qml, d, n_classes, &mut rng).unwrap()
        else {
            unreachable!()
        };
        for b in model.pre.bias.iter_mut() {
            *b = rng.random_range(-0.3..0.3);
        }
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..1.5)).collect();
        let label = rng.random_range(0..n_classes);

        let (_, cache) = model.forward(&x).unwrap();
        let grads = model.backward(&cache, label);
        let analytic: Vec<f64> = grads
            .pre_weight
            .iter()
            .chain(&grads.pre_bias)
            .chain(&grads.angles)
            .chain(&grads.head_weight)
            .chain(&grads.head_bias)
            .cloned()
            .collect();

        let sizes = [
            model.pre.weight.data().len(),
            model.pre.bias.len(),
            model.rotations.angles().len(),
            model.head.weight.data().len(),
            model.head.bias.len(),
        ];
        let loss_with = |m: &vqsafe_core::model::HybridModel| -> f64 {
            cross_entropy(&m.forward(&x).unwrap().0, label)
        };
        let mut flat = 0usize;
        for (group, &size) in sizes.iter().enumerate() {
            for i in 0..size {
                let bump = |delta: f64| {
                    let mut m = model.clone();
                    match group {
                        0 => m.pre.weight.data_mut()[i] += delta,
                        1 => m.pre.bias[i] += delta,
                        2 => m.rotations.angles_mut()[i] += delta,
                        3 => m.head.weight.data_mut()[i] += delta,
                        _ => m.head.bias[i] += delta,
                    }
                    loss_with(&m)
                };
                let fd = (bump(h) - bump(-h)) / (2.0 * h);
                assert!(
                    grad_close(analytic[flat], fd, 1e-4, 1e-7),
                    "group {} index {}: analytic {} vs fd {}",
                    group,
                    i,
                    analytic[flat],
                    fd
                );
                flat += 1;
                checked += 1;
            }
        }

        for j in 0..d {
            let mut xp = x.clone();
            xp[j] += h;
            let mut xm = x.clone();
            xm[j] -= h;
            let fd = (cross_entropy(&model.forward(&xp).unwrap().0, label)
                - cross_entropy(&model.forward(&xm).unwrap().0, label))
                / (2.0 * h);
            assert!(grad_close(grads.input[j], fd, 1e-4, 1e-7), "input {}", j);
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = elapsed.as_secs_f64() < 60.0;
    println!(
        "acceptance criterion 2 (gradient fidelity: {} partials on 100 models, {:.2}s): {}",
        checked,
        elapsed.as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_3_gradient_norm_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut max_drift: f64 = 0.0;
    for trial in 0..100 {
        let n = trial % 4 + 1;
        let params = RotationParams::new(n, random_angles(n, &mut rng)).unwrap();
        let layout = CircuitLayout::ring(n);
        let cotangent: Vec<Complex64> = (0..1usize << n)
            .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let transported = adjoint_transport(&cotangent, &params, &layout).unwrap();
        max_drift = max_drift.max((complex_norm(&transported) - complex_norm(&cotangent)).abs());
    }
    let ok = max_drift < 1e-10;
    println!(
        "acceptance criterion 3 (cotangent norm drift {:.2e} over 100 transports): {}",
        max_drift,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_4_rg_equals_auc() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut max_gap: f64 = 0.0;
    for trial in 0..200 {
        let n = rng.random_range(4..=200usize);
        let mut labels: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..2u32))).collect();
        labels[0] = 0.0;
        labels[1] = 1.0;
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if trial % 2 == 0 {
                    f64::from(rng.random_range(0..5u32)) / 4.0
                } else {
                    rng.random_range(0.0..1.0)
                }
            })
            .collect();
        let auc = pairwise_auc(&labels, &scores);
        let rg = rg_score(&ScorePair::new(labels, scores).unwrap()).unwrap();
        max_gap = max_gap.max((rg - auc).abs());
    }
    let elapsed = start.elapsed();
    let ok = max_gap < 1e-12 && elapsed.as_secs_f64() < 5.0;
    println!(
        "acceptance criterion 4 (rg vs pairwise AUC gap {:.2e}, {:.2}s): {}",
        max_gap,
        elapsed.as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_5_metric_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let mut failures = 0usize;

    for _ in 0..200 {
        let n = rng.random_range(2..=80usize);
        let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        y[0] = 10.0; // never constant
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        if rg_score(&ScorePair::new(y.clone(), y.clone()).unwrap()).unwrap() != 1.0 {
            failures += 1;
        }
        if rg_score(&ScorePair::new(y.clone(), neg).unwrap()).unwrap() != 0.0 {
            failures += 1;
        }
        let pair = ScorePair::new(y.clone(), y.clone()).unwrap();
        if cvm_divergence(&pair, 1).unwrap() != 0.0 || cvm_divergence(&pair, 2).unwrap() != 0.0 {
            failures += 1;
        }

        let nonneg: Vec<f64> = y.iter().map(|v| v.abs() + 0.1).collect();
        let scale = rng.random_range(0.01..50.0);
        let scaled: Vec<f64> = nonneg.iter().map(|v| v * scale).collect();
        if (gini_index(&nonneg).unwrap() - gini_index(&scaled).unwrap()).abs() > 1e-12 {
            failures += 1;
        }

        let mut level = 0.0;
        let levels: Vec<f64> = (0..n.max(2))
            .map(|_| {
                let current = level;
                level += rng.random_range(0.1..2.0);
                current
            })
            .collect();
        let ones = vec![1.0; levels.len()];
        if curve_area(&levels, &ones).unwrap() != 1.0 {
            failures += 1;
        }
    }

    // Probability rows from every model kind sum to one.
    for kind in [ModelKind::Qml, ModelKind::Mlp, ModelKind::Linear] {
        for _ in 0..30 {
            let d = rng.random_range(2..=6usize);
            let model = init_model(kind, d, 3, &mut rng).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let probs = model.predict(&x).unwrap();
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                failures += 1;
            }
        }
    }

    let ok = failures == 0;
    println!(
        "acceptance criterion 5 (metric identities, {} failures): {}",
        failures,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_6_desk_scale_end_to_end() {
    let start = Instant::now();
    let dataset = generate_synthetic(&SyntheticSpec {
        n_samples: 600,
        n_features: 64,
        n_classes: 3,
        separation: 6.0,
        seed: 7,
    })
    .unwrap();
    let kinds = [ModelKind::Qml, ModelKind::Mlp, ModelKind::Linear];
    let report = run_experiment(
        &dataset,
        &kinds,
        &TrainConfig::default(),
        &CurveConfig::default(),
        5,
        7,
    )
    .unwrap();

    let mut ok = true;
    for model in &report.models {
        let f1 = model.summary.f1_macro.mean;
        if matches!(model.kind, ModelKind::Qml | ModelKind::Mlp) && f1 < 0.90 {
            ok = false;
        }
        for fold in &model.folds {
            if fold.rgr_noise_curve.scores[0] != 1.0 || fold.rge_curve.scores[0] != 1.0 {
                ok = false;
            }
            if let Some(fgsm) = &fold.rgr_fgsm_curve {
                if fgsm.scores[0] != 1.0 {
                    ok = false;
                }
            }
            for area in [
                fold.rga_curve.area,
                fold.rgr_noise_curve.area,
                fold.rgr_fgsm_curve.as_ref().unwrap().area,
                fold.rge_curve.area,
            ] {
                if !(0.0..=1.0).contains(&area) {
                    ok = false;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed.as_secs_f64() < 300.0;
    let f1s: Vec<String> = report
        .models
        .iter()
        .map(|m| format!("{} {:.3}", m.kind.as_str(), m.summary.f1_macro.mean))
        .collect();
    println!(
        "acceptance criterion 6 (desk-scale 5-fold CV, F1 {}, {:.1}s): {}",
        f1s.join(", "),
        elapsed.as_secs_f64(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_7_full_width_parameter_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let qml = init_model(ModelKind::Qml, 512, 3, &mut rng).unwrap();
    let mlp = init_model(ModelKind::Mlp, 512, 3, &mut rng).unwrap();
    let ok = qml.param_count() == 262_713 && mlp.param_count() == 264_195;
    println!(
        "acceptance criterion 7 (parameter counts qml {}, mlp {}): {}",
        qml.param_count(),
        mlp.param_count(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
    if let TrainedModel::Qml(m) = &qml {
        assert_eq!(m.layout.n_qubits, 9);
    }
    if let TrainedModel::Mlp(m) = &mlp {
        assert_eq!(m.hidden_width(), 512);
    }
}

#[test]
fn criterion_8_full_run_determinism() {
    let base = tempfile::tempdir().unwrap();
    let data_dir = base.path().join("data");
    let code = vqsafe_cli::run([
        "vqsafe",
        "generate",
        "--out",
        data_dir.to_str().unwrap(),
        "--samples",
        "150",
        "--features",
        "8",
        "--classes",
        "3",
        "--separation",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    let data = data_dir.join("dataset.csv");

    let mut digests: Vec<Vec<(String, String)>> = Vec::new();
    for run in 0..2 {
        let out = base.path().join(format!("run{}", run));
        let code = vqsafe_cli::run([
            "vqsafe",
            "full-run",
            "--data",
            data.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "7",
        ]);
        assert_eq!(code, 0);
        let mut files: Vec<(String, String)> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let path = e.unwrap().path();
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                (name, std::fs::read_to_string(&path).unwrap())
            })
            .collect();
        files.sort();
        digests.push(files);
    }
    let ok = digests[0] == digests[1]
        && digests[0].iter().any(|(name, _)| name == "report.json")
        && digests[0].len() == 13;
    println!(
        "acceptance criterion 8 (byte-identical reruns across {} files): {}",
        digests[0].len(),
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

/// Optional, not gating: reproduce the reference results on real extracted
/// features. Point VQSAFE_FEATURES_CSV at a 512-feature, 3-class dataset CSV
/// and run `cargo test -p vqsafe-cli --test acceptance --release -- --ignored`.
#[test]
#[ignore = "needs a user-supplied real-feature CSV via VQSAFE_FEATURES_CSV"]
fn criterion_9_reference_reproduction_mode() {
    let Ok(path) = std::env::var("VQSAFE_FEATURES_CSV") else {
        println!("acceptance criterion 9 (reference reproduction): SKIPPED, no VQSAFE_FEATURES_CSV");
        return;
    };
    let dataset = vqsafe_cli::csvio::load_dataset_csv(std::path::Path::new(&path)).unwrap();
    assert_eq!(dataset.n_features(), 512, "expected 512-dimensional features");
    let report = run_experiment(
        &dataset,
        &[ModelKind::Qml],
        &TrainConfig::default(),
        &CurveConfig::default(),
        5,
        7,
    )
    .unwrap();
    let qml = &report.models[0];
    let f1 = qml.summary.f1_macro.mean;
    let aurgr = qml.summary.aurgr_noise.mean;
    let ok = (f1 - 0.978).abs() <= 0.02 && (aurgr - 0.9409).abs() <= 0.02;
    println!(
        "acceptance criterion 9 (reference reproduction: F1 {:.4} vs 0.978±0.02, AURGR {:.4} vs 0.9409±0.02): {}",
        f1,
        aurgr,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}
