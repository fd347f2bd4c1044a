//! Stratified cross-validation orchestration and report assembly.
//!
//! The experiment seed fans out through [`crate::seed::derive_seed`]: one
//! stream for the fold plan, one per fold, and within a fold one per model
//! kind (keyed by the kind itself, not its position in the requested list)
//! plus one per noise curve. Rerunning a single fold therefore reproduces its
//! rows of the report exactly.

use alloc::vec;
use alloc::vec::Vec;

use core::fmt::Write as _;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::{accuracy, argmax_labels, f1_macro, mse_prob, rga_multiclass, RgCurve};
use crate::model::ModelKind;
use crate::perturb::{
    feature_importance_ranking, rga_removal_curve, rge_removal_curve, rgr_fgsm_curve,
    rgr_noise_curve, NoiseGrid,
};
use crate::seed::derive_seed;
use crate::train::{train_model, TrainConfig};

// Stream tags for nested seed derivation.
const STREAM_KFOLD: u64 = 0x01;
const STREAM_RANKING: u64 = 0x02;
const STREAM_NOISE: u64 = 0x03;
const STREAM_FOLD_BASE: u64 = 0x100;
const STREAM_KIND_BASE: u64 = 0x200;

fn kind_stream(kind: ModelKind) -> u64 {
    STREAM_KIND_BASE
        + match kind {
            ModelKind::Qml => 0,
            ModelKind::Mlp => 1,
            ModelKind::Linear => 2,
        }
}

/// Feature matrix with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    n_classes: usize,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if labels.len() != features.rows() {
            return Err(Error::ShapeMismatch { expected: features.rows(), got: labels.len() });
        }
        if features.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        for (index, &label) in labels.iter().enumerate() {
            if label >= n_classes {
                return Err(Error::LabelOutOfRange { index, label, n_classes });
            }
        }
        if features.rows() < n_classes {
            return Err(Error::InvalidSpec("fewer samples than classes"));
        }
        Ok(Dataset { features, labels, n_classes })
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Assignment of every sample to one of k validation folds.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn val_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified k-fold plan: per class, samples are seeded-shuffled and dealt
/// round-robin, so per-class fold sizes differ by at most one.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldPlan> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if k < 2 {
        return Err(Error::InvalidSpec("need at least two folds"));
    }
    let n_classes = labels.iter().max().expect("nonempty") + 1;
    let mut assignments = vec![0usize; labels.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for class in 0..n_classes {
        let mut members: Vec<usize> =
            labels.iter().enumerate().filter(|(_, &y)| y == class).map(|(i, _)| i).collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::ClassTooSmall { class, count: members.len(), k });
        }
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            assignments[i] = j % k;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// Per-feature affine transform fitted on a training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Per-feature mean and population standard deviation, the latter floored
    /// at 1e-8. A constant feature keeps its exact value as the mean so it
    /// maps to exactly zero.
    pub fn fit(train: &Matrix) -> Result<Scaler> {
        if train.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        let n = train.rows() as f64;
        let mut mean = Vec::with_capacity(train.cols());
        let mut std = Vec::with_capacity(train.cols());
        for j in 0..train.cols() {
            let col = train.column(j);
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                mean.push(first);
                std.push(1e-8);
                continue;
            }
            let m = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n;
            mean.push(m);
            std.push(var.sqrt().max(1e-8));
        }
        Ok(Scaler { mean, std })
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.mean.len() {
            return Err(Error::ShapeMismatch { expected: self.mean.len(), got: m.cols() });
        }
        let mut out = m.clone();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            for ((v, mu), sd) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - mu) / sd;
            }
        }
        Ok(out)
    }
}

/// Fit a scaler on the training features and transform both splits with it,
/// so no validation statistics leak into the transform.
pub fn standardize(train: &Matrix, apply_to: &Matrix) -> Result<(Matrix, Matrix, Scaler)> {
    let scaler = Scaler::fit(train)?;
    Ok((scaler.transform(train)?, scaler.transform(apply_to)?, scaler))
}

/// Grids for the four reliability curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    /// Gaussian noise multipliers of the per-feature signal scale.
    pub noise_multipliers: Vec<f64>,
    /// FGSM budgets in standardized feature units.
    pub fgsm_epsilons: Vec<f64>,
    /// Fractions of most-confident samples to drop.
    pub sample_removal_fractions: Vec<f64>,
    /// Fractions of most-important features to remove.
    pub feature_removal_fractions: Vec<f64>,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            noise_multipliers: (0..=12).map(|i| i as f64 * 0.25).collect(),
            fgsm_epsilons: (0..=10).map(|i| i as f64 / 20.0).collect(),
            sample_removal_fractions: (0..=19).map(|i| i as f64 / 20.0).collect(),
            feature_removal_fractions: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

/// Everything measured for one model kind on one validation fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub f1_macro: f64,
    pub accuracy: f64,
    pub mse: f64,
    pub rga: f64,
    pub rga_curve: RgCurve,
    pub rgr_noise_curve: RgCurve,
    pub rgr_fgsm_curve: Option<RgCurve>,
    pub rge_curve: RgCurve,
}

/// Mean and sample (k-1) standard deviation across folds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> MetricSummary {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let std = if values.len() > 1 {
        (values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    MetricSummary { mean, std }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub f1_macro: MetricSummary,
    pub accuracy: MetricSummary,
    pub mse: MetricSummary,
    pub rga: MetricSummary,
    pub aurga: MetricSummary,
    pub aurgr_noise: MetricSummary,
    pub aurgr_fgsm: Option<MetricSummary>,
    pub aurge: MetricSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub kind: ModelKind,
    pub folds: Vec<FoldOutcome>,
    pub summary: ModelSummary,
}

/// Per-fold and aggregated results of one cross-validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub seed: u64,
    pub k: usize,
    pub config_hash: u64,
    pub models: Vec<ModelReport>,
}

/// FNV-1a hash of the semantic experiment configuration; floats hash by bit
/// pattern. `TrainConfig::seed` is excluded because per-kind seeds are
/// derived from the experiment seed.
pub fn config_hash(
    kinds: &[ModelKind],
    train: &TrainConfig,
    curves: &CurveConfig,
    k: usize,
    seed: u64,
) -> u64 {
    let mut text = alloc::string::String::new();
    for kind in kinds {
        let _ = write!(text, "{},", kind.as_str());
    }
    let _ = write!(
        text,
        ";lr={:016x};bs={};ep={};b1={:016x};b2={:016x};eps={:016x};l2={:016x};k={};seed={}",
        train.learning_rate.to_bits(),
        train.batch_size,
        train.epochs,
        train.adam_beta1.to_bits(),
        train.adam_beta2.to_bits(),
        train.adam_epsilon.to_bits(),
        train.l2_strength.to_bits(),
        k,
        seed
    );
    for grid in [
        &curves.noise_multipliers,
        &curves.fgsm_epsilons,
        &curves.sample_removal_fractions,
        &curves.feature_removal_fractions,
    ] {
        let _ = write!(text, ";[");
        for v in grid.iter() {
            let _ = write!(text, "{:016x},", v.to_bits());
        }
        let _ = write!(text, "]");
    }

    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Train and evaluate every requested kind on one fold.
pub fn run_fold(
    dataset: &Dataset,
    plan: &FoldPlan,
    fold: usize,
    kinds: &[ModelKind],
    train_config: &TrainConfig,
    curve_config: &CurveConfig,
    experiment_seed: u64,
) -> Result<Vec<(ModelKind, FoldOutcome)>> {
    let fold_seed = derive_seed(experiment_seed, STREAM_FOLD_BASE + fold as u64);
    let train_idx = plan.train_indices(fold);
    let val_idx = plan.val_indices(fold);

    let train_raw = dataset.features().select_rows(&train_idx);
    let val_raw = dataset.features().select_rows(&val_idx);
    let (train_std, val_std, _scaler) = standardize(&train_raw, &val_raw)?;
    let train_labels: Vec<usize> = train_idx.iter().map(|&i| dataset.labels()[i]).collect();
    let val_labels: Vec<usize> = val_idx.iter().map(|&i| dataset.labels()[i]).collect();
    let train_split = Dataset::new(train_std, train_labels, dataset.n_classes())?;

    // One relevance ordering per fold, shared by all kinds.
    let ranking = feature_importance_ranking(&train_split, derive_seed(fold_seed, STREAM_RANKING))?;
    let noise_grid = NoiseGrid::from_features(&val_std, curve_config.noise_multipliers.clone())?;

    let mut outcomes = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let kind_seed = derive_seed(fold_seed, kind_stream(kind));
        let mut config = train_config.clone();
        config.seed = kind_seed;
        let model = train_model(kind, &train_split, &config)?;

        let probs = model.predict_matrix(&val_std)?;
        let predicted = argmax_labels(&probs);
        let outcome = FoldOutcome {
            fold,
            f1_macro: f1_macro(&val_labels, &predicted)?,
            accuracy: accuracy(&val_labels, &predicted)?,
            mse: mse_prob(&val_labels, &probs)?,
            rga: rga_multiclass(&val_labels, &probs)?,
            rga_curve: rga_removal_curve(&probs, &val_labels, &curve_config.sample_removal_fractions)?,
            rgr_noise_curve: rgr_noise_curve(
                &model,
                &val_std,
                &val_labels,
                &noise_grid,
                derive_seed(kind_seed, STREAM_NOISE),
            )?,
            rgr_fgsm_curve: Some(rgr_fgsm_curve(
                &model,
                &val_std,
                &val_labels,
                &curve_config.fgsm_epsilons,
            )?),
            rge_curve: rge_removal_curve(
                &model,
                &val_std,
                &val_labels,
                &ranking,
                &curve_config.feature_removal_fractions,
            )?,
        };
        outcomes.push((kind, outcome));
    }
    Ok(outcomes)
}

fn summarize_kind(folds: &[FoldOutcome]) -> ModelSummary {
    let collect = |f: &dyn Fn(&FoldOutcome) -> f64| -> Vec<f64> { folds.iter().map(f).collect() };
    let fgsm: Option<Vec<f64>> = folds
        .iter()
        .map(|o| o.rgr_fgsm_curve.as_ref().map(|c| c.area))
        .collect();
    ModelSummary {
        f1_macro: summarize(&collect(&|o| o.f1_macro)),
        accuracy: summarize(&collect(&|o| o.accuracy)),
        mse: summarize(&collect(&|o| o.mse)),
        rga: summarize(&collect(&|o| o.rga)),
        aurga: summarize(&collect(&|o| o.rga_curve.area)),
        aurgr_noise: summarize(&collect(&|o| o.rgr_noise_curve.area)),
        aurgr_fgsm: fgsm.map(|v| summarize(&v)),
        aurge: summarize(&collect(&|o| o.rge_curve.area)),
    }
}

/// Run the full cross-validated experiment: per fold, standardize, train
/// every kind, measure predictive metrics and all reliability curves, then
/// aggregate mean ± std across folds.
pub fn run_experiment(
    dataset: &Dataset,
    kinds: &[ModelKind],
    train_config: &TrainConfig,
    curve_config: &CurveConfig,
    k: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if kinds.is_empty() {
        return Err(Error::InvalidSpec("no model kinds requested"));
    }
    let plan = stratified_kfold(dataset.labels(), k, derive_seed(seed, STREAM_KFOLD))?;
    let mut per_kind: Vec<(ModelKind, Vec<FoldOutcome>)> =
        kinds.iter().map(|&kind| (kind, Vec::with_capacity(k))).collect();
    for fold in 0..k {
        let outcomes = run_fold(dataset, &plan, fold, kinds, train_config, curve_config, seed)
            .map_err(|cause| Error::FoldFailed { fold, cause: alloc::boxed::Box::new(cause) })?;
        for ((_, collected), (_, outcome)) in per_kind.iter_mut().zip(outcomes) {
            collected.push(outcome);
        }
    }
    let models = per_kind
        .into_iter()
        .map(|(kind, folds)| {
            let summary = summarize_kind(&folds);
            ModelReport { kind, folds, summary }
        })
        .collect();
    Ok(ExperimentReport {
        seed,
        k,
        config_hash: config_hash(kinds, train_config, curve_config, k, seed),
        models,
    })
}
