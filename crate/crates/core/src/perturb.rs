//! Stress conditions behind each reliability curve: Gaussian feature noise,
//! FGSM sweeps, confidence-ranked sample removal and importance-ranked
//! feature removal.
//!
//! Every curve starts at a zero-strength level whose score is exactly 1 for
//! the robustness/explainability variants (identity perturbation), and each
//! level draws from its own seed stream so levels can be evaluated in any
//! order.

use alloc::vec::Vec;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::eval::Dataset;
use crate::matrix::Matrix;
use crate::metrics::{rga_multiclass, rge_score, rgr_score, RgCurve};
use crate::model::{fgsm_perturb, ModelKind, ProbMatrix, TrainedModel};
use crate::seed::derive_seed;
use crate::train::{train_model, TrainConfig};

fn validate_grid_from_zero(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateGrid);
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidSpec("perturbation grid must start at 0"));
    }
    Ok(())
}

/// Noise intensities as multiples of the per-feature signal scale.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseGrid {
    /// Ascending multipliers starting at 0.
    pub multipliers: Vec<f64>,
    /// Per-feature standard deviation of the evaluated split.
    pub per_feature_sigma: Vec<f64>,
}

impl NoiseGrid {
    /// Signal scale taken as the per-feature (population) standard deviation
    /// of the given split.
    pub fn from_features(features: &Matrix, multipliers: Vec<f64>) -> Result<Self> {
        validate_grid_from_zero(&multipliers)?;
        if features.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        let n = features.rows() as f64;
        let mut sigma = Vec::with_capacity(features.cols());
        for j in 0..features.cols() {
            let col = features.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n;
            sigma.push(var.sqrt());
        }
        Ok(NoiseGrid { multipliers, per_feature_sigma: sigma })
    }
}

/// Add independent zero-mean Gaussian noise with per-feature standard
/// deviation `multiplier·sigma[j]`, drawn row-major from the given seed.
pub fn gaussian_perturb(
    features: &Matrix,
    sigma: &[f64],
    multiplier: f64,
    seed: u64,
) -> Result<Matrix> {
    if sigma.len() != features.cols() {
        return Err(Error::ShapeMismatch { expected: features.cols(), got: sigma.len() });
    }
    if multiplier < 0.0 {
        return Err(Error::InvalidSpec("noise multiplier must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = features.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        for (v, s) in row.iter_mut().zip(sigma) {
            let z: f64 = rng.sample(StandardNormal);
            *v += multiplier * s * z;
        }
    }
    Ok(out)
}

/// Robustness curve under increasing Gaussian feature noise.
pub fn rgr_noise_curve(
    model: &TrainedModel,
    features: &Matrix,
    labels: &[usize],
    grid: &NoiseGrid,
    seed: u64,
) -> Result<RgCurve> {
    let original = model.predict_matrix(features)?;
    let mut scores = Vec::with_capacity(grid.multipliers.len());
    for (level, &multiplier) in grid.multipliers.iter().enumerate() {
        let perturbed = gaussian_perturb(
            features,
            &grid.per_feature_sigma,
            multiplier,
            derive_seed(seed, level as u64),
        )?;
        let probs = model.predict_matrix(&perturbed)?;
        scores.push(rgr_score(&original, &probs, labels)?);
    }
    RgCurve::new(grid.multipliers.clone(), scores)
}

/// Robustness curve under single-step adversarial perturbations of growing
/// budget, each sample attacked against its true label.
pub fn rgr_fgsm_curve(
    model: &TrainedModel,
    features: &Matrix,
    labels: &[usize],
    epsilons: &[f64],
) -> Result<RgCurve> {
    validate_grid_from_zero(epsilons)?;
    if labels.len() != features.rows() {
        return Err(Error::ShapeMismatch { expected: features.rows(), got: labels.len() });
    }
    let original = model.predict_matrix(features)?;
    let mut scores = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut perturbed = Matrix::zeros(features.rows(), features.cols());
        for (i, &label) in labels.iter().enumerate() {
            let adv = fgsm_perturb(model, features.row(i), label, eps)?;
            perturbed.row_mut(i).copy_from_slice(&adv);
        }
        let probs = model.predict_matrix(&perturbed)?;
        scores.push(rgr_score(&original, &probs, labels)?);
    }
    RgCurve::new(epsilons.to_vec(), scores)
}

/// Ranking-accuracy curve under removal of the most confident samples.
///
/// Confidence is the per-row maximum probability. Grid points whose remaining
/// samples hold only one class are skipped and excluded from the area.
pub fn rga_removal_curve(
    probs: &ProbMatrix,
    labels: &[usize],
    fractions: &[f64],
) -> Result<RgCurve> {
    validate_grid_from_zero(fractions)?;
    if *fractions.last().expect("validated nonempty") > 0.95 {
        return Err(Error::InvalidSpec("sample-removal fractions must stay at or below 0.95"));
    }
    if labels.len() != probs.rows() {
        return Err(Error::ShapeMismatch { expected: probs.rows(), got: labels.len() });
    }
    let n = probs.rows();

    // Most confident first; ties keep ascending row order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ca = probs.row(a).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let cb = probs.row(b).iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        cb.partial_cmp(&ca).expect("finite probabilities")
    });

    let mut levels = Vec::new();
    let mut scores = Vec::new();
    for &f in fractions {
        let drop = ((f * n as f64).floor() as usize).min(n);
        let mut kept: Vec<usize> = order[drop..].to_vec();
        kept.sort_unstable();
        if kept.len() < 2 {
            continue;
        }
        let sub_labels: Vec<usize> = kept.iter().map(|&i| labels[i]).collect();
        let mut sub = Matrix::zeros(kept.len(), probs.n_classes());
        for (row, &i) in kept.iter().enumerate() {
            sub.row_mut(row).copy_from_slice(probs.row(i));
        }
        let sub_probs = ProbMatrix::new(sub)?;
        match rga_multiclass(&sub_labels, &sub_probs) {
            Ok(score) => {
                levels.push(f);
                scores.push(score);
            }
            Err(Error::SingleClassSplit) => continue,
            Err(e) => return Err(e),
        }
    }
    RgCurve::new(levels, scores)
}

/// Shared model-agnostic feature relevance order, most important first.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    order: Vec<usize>,
}

impl FeatureRanking {
    /// `order` must be a permutation of 0..d.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let d = order.len();
        let mut seen = alloc::vec![false; d];
        for &j in &order {
            if j >= d || seen[j] {
                return Err(Error::InvalidSpec("ranking is not a permutation"));
            }
            seen[j] = true;
        }
        Ok(FeatureRanking { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// How the ranking was obtained.
    pub fn source(&self) -> &'static str {
        "linear-probe coefficient magnitude"
    }
}

/// Rank features by fitting the linear baseline on the training split and
/// summing absolute per-class coefficients, largest first.
pub fn feature_importance_ranking(train: &Dataset, seed: u64) -> Result<FeatureRanking> {
    let config = TrainConfig::default().with_seed(seed);
    let model = train_model(ModelKind::Linear, train, &config)?;
    let TrainedModel::Linear(linear) = model else { unreachable!("trained a linear model") };
    let d = linear.n_features();
    let mut importance = alloc::vec![0.0; d];
    for c in 0..linear.n_classes() {
        for (j, imp) in importance.iter_mut().enumerate() {
            *imp += linear.weight.get(c, j).abs();
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        importance[b].partial_cmp(&importance[a]).expect("finite coefficients").then(a.cmp(&b))
    });
    FeatureRanking::new(order)
}

/// Explainability curve: zero out the top ⌈k·d⌉ most important features
/// (zero is the standardized mean) and compare against full-feature
/// predictions.
pub fn rge_removal_curve(
    model: &TrainedModel,
    features: &Matrix,
    labels: &[usize],
    ranking: &FeatureRanking,
    fractions: &[f64],
) -> Result<RgCurve> {
    validate_grid_from_zero(fractions)?;
    if ranking.order.len() != features.cols() {
        return Err(Error::ShapeMismatch { expected: features.cols(), got: ranking.order.len() });
    }
    let d = features.cols();
    let full = model.predict_matrix(features)?;
    let mut scores = Vec::with_capacity(fractions.len());
    for &k in fractions {
        let removed = ((k * d as f64).ceil() as usize).min(d);
        let mut reduced = features.clone();
        for &j in &ranking.order[..removed] {
            for i in 0..reduced.rows() {
                reduced.set(i, j, 0.0);
            }
        }
        let probs = model.predict_matrix(&reduced)?;
        scores.push(rge_score(&full, &probs, labels)?);
    }
    RgCurve::new(fractions.to_vec(), scores)
}
