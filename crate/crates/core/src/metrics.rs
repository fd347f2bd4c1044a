//! Rank-graduation (RG) metrics and classical predictive metrics.
//!
//! The RG score compares how a candidate ranking orders the reference
//! values. It is computed from three cumulative-sum curves of the reference
//! values: ordered by ascending candidate (with reference values inside
//! tied-candidate groups replaced by the group mean), ascending, and
//! descending:
//!
//! `RG = (ΣD - ΣC) / (ΣD - ΣA)`
//!
//! which is 1 for a perfectly concordant ranking, 0 for a perfectly inverted
//! one, and 0.5 when the candidate carries no ranking information (all tied).
//! For a binary reference this estimator coincides with the pairwise
//! concordance AUC with ties counted 1/2, which is the controlling test for
//! the implementation. The Cramér–von Mises divergence and Gini index behind
//! the metric's definition are exposed separately.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::ProbMatrix;

/// Index-aligned reference/candidate score vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePair {
    reference: Vec<f64>,
    candidate: Vec<f64>,
}

impl ScorePair {
    pub fn new(reference: Vec<f64>, candidate: Vec<f64>) -> Result<Self> {
        if reference.len() != candidate.len() {
            return Err(Error::ShapeMismatch { expected: reference.len(), got: candidate.len() });
        }
        if reference.len() < 2 {
            return Err(Error::EmptyInput);
        }
        if reference.iter().chain(&candidate).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(ScorePair { reference, candidate })
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn candidate(&self) -> &[f64] {
        &self.candidate
    }
}

/// Empirical cumulative distribution function, right-continuous.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

/// Build the ECDF of a sample: `F(u) = #{values ≤ u} / n`.
pub fn ecdf(values: &[f64]) -> Result<Ecdf> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    Ok(Ecdf { sorted })
}

impl Ecdf {
    pub fn eval(&self, u: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= u);
        count as f64 / self.sorted.len() as f64
    }
}

/// p-th order Cramér–von Mises divergence between the two empirical CDFs,
/// integrated against the reference sample:
/// `(1/n)·Σ_i |F_Y(y_i) - F_Y'(y_i)|^p`.
pub fn cvm_divergence(pair: &ScorePair, p: u32) -> Result<f64> {
    assert!(p >= 1, "divergence order must be positive");
    let f_ref = ecdf(pair.reference())?;
    let f_cand = ecdf(pair.candidate())?;
    let n = pair.len() as f64;
    let sum: f64 = pair
        .reference()
        .iter()
        .map(|&y| (f_ref.eval(y) - f_cand.eval(y)).abs().powi(p as i32))
        .sum();
    Ok(sum / n)
}

/// Gini index of a nonnegative sample via the Lorenz formulation
/// `Σ_i (2i - n - 1)·y_(i) / (n²·ȳ)` with y_(i) ascending, i one-based.
pub fn gini_index(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue);
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if values.iter().any(|&v| v < 0.0) || mean <= 0.0 {
        return Err(Error::NonPositiveMean);
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok(0.0);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut acc = 0.0;
    for (i, &y) in sorted.iter().enumerate() {
        acc += (2.0 * (i + 1) as f64 - n as f64 - 1.0) * y;
    }
    Ok(acc / (n as f64 * n as f64 * mean))
}

/// Σ_i C_i for the running prefix sums C of `values` in iteration order.
fn cumulative_total<'a>(values: impl Iterator<Item = &'a f64>) -> f64 {
    let mut running = 0.0;
    let mut total = 0.0;
    for &v in values {
        running += v;
        total += running;
    }
    total
}

/// Rank-graduation score of a candidate ranking against reference values.
///
/// ```
/// use vqsafe_core::metrics::{rg_score, ScorePair};
///
/// let labels = vec![0.0, 1.0, 0.0, 1.0];
/// let scores = vec![0.1, 0.9, 0.4, 0.7];
/// let pair = ScorePair::new(labels, scores).unwrap();
/// // Binary reference: the RG score is the ROC AUC.
/// assert_eq!(rg_score(&pair).unwrap(), 1.0);
/// ```
pub fn rg_score(pair: &ScorePair) -> Result<f64> {
    let n = pair.len();
    let reference = pair.reference();
    let candidate = pair.candidate();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| candidate[a].partial_cmp(&candidate[b]).expect("finite values"));

    // Reference values ordered by candidate, with tied-candidate groups
    // replaced by their group mean. Groups whose reference values are all
    // equal keep the value itself so that identical rankings score exactly 1.
    let mut by_candidate = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && candidate[order[end]] == candidate[order[start]] {
            end += 1;
        }
        let first = reference[order[start]];
        if order[start..end].iter().all(|&k| reference[k] == first) {
            for slot in &mut by_candidate[start..end] {
                *slot = first;
            }
        } else {
            let sum: f64 = order[start..end].iter().map(|&k| reference[k]).sum();
            let mean = sum / (end - start) as f64;
            for slot in &mut by_candidate[start..end] {
                *slot = mean;
            }
        }
        start = end;
    }

    let mut sorted = reference.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));

    let concordant = cumulative_total(by_candidate.iter());
    let ascending = cumulative_total(sorted.iter());
    let descending = cumulative_total(sorted.iter().rev());

    let denom = descending - ascending;
    if denom == 0.0 {
        return Err(Error::ConstantReference);
    }
    let rg = (descending - concordant) / denom;
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&rg), "rg estimator left [0,1]: {}", rg);
    Ok(rg.clamp(0.0, 1.0))
}

/// Predictive R²: `1 - MSE(Y, Y') / Var(Y)` with the population variance.
pub fn r_squared(pair: &ScorePair) -> Result<f64> {
    let n = pair.len() as f64;
    let mean = pair.reference().iter().sum::<f64>() / n;
    let var = pair.reference().iter().map(|&y| (y - mean) * (y - mean)).sum::<f64>() / n;
    if var == 0.0 {
        return Err(Error::ConstantReference);
    }
    let mse = pair
        .reference()
        .iter()
        .zip(pair.candidate())
        .map(|(&y, &p)| (y - p) * (y - p))
        .sum::<f64>()
        / n;
    Ok(1.0 - mse / var)
}

/// Convex class weights, e.g. empirical class frequencies of a split.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassWeights {
    weights: Vec<f64>,
}

impl ClassWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::NonFiniteValue);
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability { row: 0 });
        }
        Ok(ClassWeights { weights })
    }

    /// Empirical frequencies of each class among `labels`; absent classes get
    /// weight zero.
    pub fn from_labels(labels: &[usize], n_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut counts = vec![0usize; n_classes];
        for &y in labels {
            if y >= n_classes {
                return Err(Error::LabelOutOfRange { index: 0, label: y, n_classes });
            }
            counts[y] += 1;
        }
        let n = labels.len() as f64;
        Ok(ClassWeights { weights: counts.iter().map(|&c| c as f64 / n).collect() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn present_classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(c, _)| c)
    }
}

/// Multiclass rank-graduation accuracy: one-vs-rest RG of each present class
/// indicator against its predicted probability, weighted by class frequency.
pub fn rga_multiclass(labels: &[usize], probs: &ProbMatrix) -> Result<f64> {
    if labels.len() != probs.rows() {
        return Err(Error::ShapeMismatch { expected: probs.rows(), got: labels.len() });
    }
    let weights = ClassWeights::from_labels(labels, probs.n_classes())?;
    if weights.present_classes().count() < 2 {
        return Err(Error::SingleClassSplit);
    }
    let mut total = 0.0;
    for c in weights.present_classes() {
        let indicator: Vec<f64> = labels.iter().map(|&y| if y == c { 1.0 } else { 0.0 }).collect();
        let pair = ScorePair::new(indicator, probs.column(c))?;
        total += weights.weights()[c] * rg_score(&pair)?;
    }
    Ok(total)
}

/// Class-frequency-weighted RG between two aligned probability matrices.
fn weighted_rg_by_class(
    reference: &ProbMatrix,
    candidate: &ProbMatrix,
    labels: &[usize],
) -> Result<f64> {
    if reference.rows() != candidate.rows() || reference.n_classes() != candidate.n_classes() {
        return Err(Error::ShapeMismatch { expected: reference.rows(), got: candidate.rows() });
    }
    if labels.len() != reference.rows() {
        return Err(Error::ShapeMismatch { expected: reference.rows(), got: labels.len() });
    }
    let weights = ClassWeights::from_labels(labels, reference.n_classes())?;
    let mut total = 0.0;
    for c in weights.present_classes() {
        let pair = ScorePair::new(reference.column(c), candidate.column(c))?;
        total += weights.weights()[c] * rg_score(&pair)?;
    }
    Ok(total)
}

/// Rank-graduation robustness: how well predictions on perturbed data
/// preserve the ranking of the original predictions.
pub fn rgr_score(
    probs_original: &ProbMatrix,
    probs_perturbed: &ProbMatrix,
    labels: &[usize],
) -> Result<f64> {
    weighted_rg_by_class(probs_original, probs_perturbed, labels)
}

/// Rank-graduation explainability: same comparison against predictions made
/// after removing features.
pub fn rge_score(
    probs_full: &ProbMatrix,
    probs_reduced: &ProbMatrix,
    labels: &[usize],
) -> Result<f64> {
    weighted_rg_by_class(probs_full, probs_reduced, labels)
}

/// Normalized trapezoidal area of a score curve over its level range.
pub fn curve_area(levels: &[f64], scores: &[f64]) -> Result<f64> {
    if levels.len() != scores.len() {
        return Err(Error::ShapeMismatch { expected: levels.len(), got: scores.len() });
    }
    if levels.len() < 2 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateGrid);
    }
    let mut trapezoid = 0.0;
    let mut range = 0.0;
    for i in 1..levels.len() {
        let dl = levels[i] - levels[i - 1];
        trapezoid += dl * (scores[i] + scores[i - 1]) / 2.0;
        range += dl;
    }
    Ok(trapezoid / range)
}

/// A score curve over ascending perturbation levels with its normalized area.
#[derive(Debug, Clone, PartialEq)]
pub struct RgCurve {
    pub levels: Vec<f64>,
    pub scores: Vec<f64>,
    pub area: f64,
}

impl RgCurve {
    pub fn new(levels: Vec<f64>, scores: Vec<f64>) -> Result<Self> {
        let area = curve_area(&levels, &scores)?;
        Ok(RgCurve { levels, scores, area })
    }
}

/// Per-row argmax with lowest-index tie-breaking.
pub fn argmax_labels(probs: &ProbMatrix) -> Vec<usize> {
    (0..probs.rows())
        .map(|i| {
            let row = probs.row(i);
            let mut best = 0;
            for (c, &p) in row.iter().enumerate().skip(1) {
                if p > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

pub fn accuracy(labels: &[usize], predicted: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if labels.len() != predicted.len() {
        return Err(Error::ShapeMismatch { expected: labels.len(), got: predicted.len() });
    }
    let hits = labels.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Macro F1 over the classes present in `labels`; a class with zero precision
/// and recall contributes an F1 of 0.
pub fn f1_macro(labels: &[usize], predicted: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if labels.len() != predicted.len() {
        return Err(Error::ShapeMismatch { expected: labels.len(), got: predicted.len() });
    }
    let n_classes = labels.iter().chain(predicted).max().map_or(0, |&m| m + 1);
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&y, &p) in labels.iter().zip(predicted) {
        if y == p {
            tp[y] += 1;
        } else {
            fp[p] += 1;
            fn_[y] += 1;
        }
    }
    let mut sum = 0.0;
    let mut present = 0;
    for c in 0..n_classes {
        if tp[c] + fn_[c] == 0 {
            continue; // class absent from the true labels
        }
        present += 1;
        let denom = 2 * tp[c] + fp[c] + fn_[c];
        if denom > 0 {
            sum += 2.0 * tp[c] as f64 / denom as f64;
        }
    }
    Ok(sum / present as f64)
}

/// Mean squared error between probability rows and one-hot labels:
/// `(1/n)·Σ_i ‖p_i - onehot(y_i)‖²`.
pub fn mse_prob(labels: &[usize], probs: &ProbMatrix) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if labels.len() != probs.rows() {
        return Err(Error::ShapeMismatch { expected: probs.rows(), got: labels.len() });
    }
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        for (c, &p) in probs.row(i).iter().enumerate() {
            let t = if c == y { 1.0 } else { 0.0 };
            total += (p - t) * (p - t);
        }
    }
    Ok(total / labels.len() as f64)
}
