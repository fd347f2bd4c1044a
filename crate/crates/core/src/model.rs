//! The hybrid classifier and its classical baselines.
//!
//! The hybrid forward pass is
//! `softmax(W_c·q + b_c)` with `q = ⟨Z⟩` after one strongly entangling layer
//! on the amplitude-encoded output of `gelu(W·x + b)`. The MLP baseline
//! replaces the quantum block with a classical hidden layer of the same input
//! width; the linear baseline is plain multinomial logistic regression.
//! Every kind exposes probabilities, an exact backward pass for all parameter
//! groups, and the input gradient needed for FGSM.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quantum::{
    circuit_backward_cached, circuit_forward, CircuitCache, CircuitLayout, RotationParams,
};

/// GELU via the tanh approximation
/// `0.5·x·(1 + tanh(√(2/π)·(x + 0.044715·x³)))`.
pub fn gelu(x: f64) -> f64 {
    const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
    0.5 * x * (1.0 + (SQRT_2_OVER_PI * (x + 0.044715 * x * x * x)).tanh())
}

/// Derivative of [`gelu`].
pub fn gelu_derivative(x: f64) -> f64 {
    const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
    let t = (SQRT_2_OVER_PI * (x + 0.044715 * x * x * x)).tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * SQRT_2_OVER_PI * (1.0 + 3.0 * 0.044715 * x * x)
}

/// Numerically shifted softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// Cross-entropy `-log p[label]` with the probability clamped at 1e-12.
pub fn cross_entropy(probs: &[f64], label: usize) -> f64 {
    debug_assert!(label < probs.len());
    -(probs[label].max(1e-12)).ln()
}

/// Row-stochastic matrix of class probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbMatrix(Matrix);

impl ProbMatrix {
    /// Validates that every row sums to 1 within 1e-9 with entries in [0, 1].
    pub fn new(values: Matrix) -> Result<Self> {
        for i in 0..values.rows() {
            let row = values.row(i);
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidProbability { row: i });
            }
        }
        Ok(ProbMatrix(values))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn n_classes(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.0.column(c)
    }
}

/// Trainable linear + GELU map applied before amplitude encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct PreLayer {
    /// 2^n × d.
    pub weight: Matrix,
    /// Length 2^n.
    pub bias: Vec<f64>,
}

/// Classical linear head mapping ⟨Z⟩ features to class logits.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputHead {
    /// n_classes × n_qubits (or × hidden width for classical models).
    pub weight: Matrix,
    /// Length n_classes.
    pub bias: Vec<f64>,
}

/// The full hybrid model: pre-layer → encode → entangling layer → ⟨Z⟩ → head.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel {
    pub pre: PreLayer,
    pub rotations: RotationParams,
    pub layout: CircuitLayout,
    pub head: OutputHead,
}

/// Smallest qubit count whose register holds `d` features.
pub fn n_qubits_for_features(d: usize) -> usize {
    assert!(d > 0, "need at least one feature");
    let mut n = 0;
    while (1usize << n) < d {
        n += 1;
    }
    n.max(1)
}

impl HybridModel {
    pub fn new(
        pre: PreLayer,
        rotations: RotationParams,
        layout: CircuitLayout,
        head: OutputHead,
    ) -> Result<Self> {
        let n = layout.n_qubits;
        let dim = 1usize << n;
        if pre.weight.rows() != dim || pre.bias.len() != dim {
            return Err(Error::ShapeMismatch { expected: dim, got: pre.weight.rows() });
        }
        if rotations.n_qubits() != n {
            return Err(Error::ShapeMismatch { expected: n, got: rotations.n_qubits() });
        }
        if head.weight.cols() != n || head.bias.len() != head.weight.rows() {
            return Err(Error::ShapeMismatch { expected: n, got: head.weight.cols() });
        }
        if head.weight.rows() < 2 {
            return Err(Error::SingleClassSplit);
        }
        Ok(HybridModel { pre, rotations, layout, head })
    }

    pub fn n_features(&self) -> usize {
        self.pre.weight.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.head.weight.rows()
    }

    /// Total trainable scalar count across all parameter groups.
    pub fn param_count(&self) -> usize {
        self.pre.weight.rows() * self.pre.weight.cols()
            + self.pre.bias.len()
            + self.rotations.angles().len()
            + self.head.weight.rows() * self.head.weight.cols()
            + self.head.bias.len()
    }

    pub fn forward(&self, features: &[f64]) -> Result<(Vec<f64>, HybridCache)> {
        if features.len() != self.n_features() {
            return Err(Error::ShapeMismatch { expected: self.n_features(), got: features.len() });
        }
        let mut pre_linear = self.pre.weight.matvec(features);
        for (u, b) in pre_linear.iter_mut().zip(&self.pre.bias) {
            *u += b;
        }
        let activated: Vec<f64> = pre_linear.iter().map(|&u| gelu(u)).collect();
        let circuit = circuit_forward(&activated, &self.rotations, &self.layout)?;
        let mut logits = self.head.weight.matvec(circuit.expectations());
        for (l, b) in logits.iter_mut().zip(&self.head.bias) {
            *l += b;
        }
        let probs = softmax(&logits);
        let cache = HybridCache { features: features.to_vec(), pre_linear, circuit, probs: probs.clone() };
        Ok((probs, cache))
    }

    /// Gradients of `cross_entropy ∘ forward` for every parameter group and
    /// the input features.
    pub fn backward(&self, cache: &HybridCache, label: usize) -> HybridGradients {
        let n_classes = self.n_classes();
        debug_assert!(label < n_classes);

        // d loss / d logits = p - onehot(y).
        let mut dlogits = cache.probs.clone();
        dlogits[label] -= 1.0;

        let q = cache.circuit.expectations();
        let mut head_weight = vec![0.0; n_classes * q.len()];
        for c in 0..n_classes {
            for (i, qi) in q.iter().enumerate() {
                head_weight[c * q.len() + i] = dlogits[c] * qi;
            }
        }
        let dq = self.head.weight.matvec_transposed(&dlogits);

        let circuit_grads =
            circuit_backward_cached(&cache.circuit, &self.rotations, &self.layout, &dq);

        // Through the GELU.
        let du: Vec<f64> = circuit_grads
            .input
            .iter()
            .zip(&cache.pre_linear)
            .map(|(&dh, &u)| dh * gelu_derivative(u))
            .collect();

        let d = self.n_features();
        let mut pre_weight = vec![0.0; du.len() * d];
        for (j, &duj) in du.iter().enumerate() {
            for (k, &xk) in cache.features.iter().enumerate() {
                pre_weight[j * d + k] = duj * xk;
            }
        }
        let input = self.pre.weight.matvec_transposed(&du);

        HybridGradients {
            pre_weight,
            pre_bias: du,
            angles: circuit_grads.angles,
            head_weight,
            head_bias: dlogits,
            input,
        }
    }
}

/// Forward activations of [`HybridModel::forward`].
#[derive(Debug, Clone)]
pub struct HybridCache {
    features: Vec<f64>,
    pre_linear: Vec<f64>,
    circuit: CircuitCache,
    probs: Vec<f64>,
}

impl HybridCache {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn expectations(&self) -> &[f64] {
        self.circuit.expectations()
    }
}

/// Gradients for every parameter group of the hybrid model, flattened in the
/// same row-major layout as the parameters themselves.
#[derive(Debug, Clone)]
pub struct HybridGradients {
    pub pre_weight: Vec<f64>,
    pub pre_bias: Vec<f64>,
    pub angles: Vec<f64>,
    pub head_weight: Vec<f64>,
    pub head_bias: Vec<f64>,
    pub input: Vec<f64>,
}

/// Shallow MLP: one hidden layer as wide as the input, GELU, linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

impl MlpModel {
    pub fn n_features(&self) -> usize {
        self.w1.cols()
    }

    pub fn hidden_width(&self) -> usize {
        self.w1.rows()
    }

    pub fn n_classes(&self) -> usize {
        self.w2.rows()
    }

    pub fn param_count(&self) -> usize {
        self.w1.rows() * self.w1.cols() + self.b1.len() + self.w2.rows() * self.w2.cols() + self.b2.len()
    }

    pub fn forward(&self, features: &[f64]) -> Result<(Vec<f64>, MlpCache)> {
        if features.len() != self.n_features() {
            return Err(Error::ShapeMismatch { expected: self.n_features(), got: features.len() });
        }
        let mut u1 = self.w1.matvec(features);
        for (u, b) in u1.iter_mut().zip(&self.b1) {
            *u += b;
        }
        let a1: Vec<f64> = u1.iter().map(|&u| gelu(u)).collect();
        let mut logits = self.w2.matvec(&a1);
        for (l, b) in logits.iter_mut().zip(&self.b2) {
            *l += b;
        }
        let probs = softmax(&logits);
        Ok((probs.clone(), MlpCache { features: features.to_vec(), u1, a1, probs }))
    }

    pub fn backward(&self, cache: &MlpCache, label: usize) -> MlpGradients {
        let mut dlogits = cache.probs.clone();
        dlogits[label] -= 1.0;

        let h = cache.a1.len();
        let mut w2 = vec![0.0; dlogits.len() * h];
        for (c, &dc) in dlogits.iter().enumerate() {
            for (i, &ai) in cache.a1.iter().enumerate() {
                w2[c * h + i] = dc * ai;
            }
        }
        let da1 = self.w2.matvec_transposed(&dlogits);
        let du1: Vec<f64> = da1
            .iter()
            .zip(&cache.u1)
            .map(|(&da, &u)| da * gelu_derivative(u))
            .collect();

        let d = self.n_features();
        let mut w1 = vec![0.0; h * d];
        for (j, &duj) in du1.iter().enumerate() {
            for (k, &xk) in cache.features.iter().enumerate() {
                w1[j * d + k] = duj * xk;
            }
        }
        let input = self.w1.matvec_transposed(&du1);

        MlpGradients { w1, b1: du1, w2, b2: dlogits, input }
    }
}

#[derive(Debug, Clone)]
pub struct MlpCache {
    features: Vec<f64>,
    u1: Vec<f64>,
    a1: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MlpGradients {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub input: Vec<f64>,
}

/// Multinomial logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.weight.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.weight.rows()
    }

    pub fn param_count(&self) -> usize {
        self.weight.rows() * self.weight.cols() + self.bias.len()
    }

    pub fn forward(&self, features: &[f64]) -> Result<(Vec<f64>, LinearCache)> {
        if features.len() != self.n_features() {
            return Err(Error::ShapeMismatch { expected: self.n_features(), got: features.len() });
        }
        let mut logits = self.weight.matvec(features);
        for (l, b) in logits.iter_mut().zip(&self.bias) {
            *l += b;
        }
        let probs = softmax(&logits);
        Ok((probs.clone(), LinearCache { features: features.to_vec(), probs }))
    }

    pub fn backward(&self, cache: &LinearCache, label: usize) -> LinearGradients {
        let mut dlogits = cache.probs.clone();
        dlogits[label] -= 1.0;
        let d = self.n_features();
        let mut weight = vec![0.0; dlogits.len() * d];
        for (c, &dc) in dlogits.iter().enumerate() {
            for (k, &xk) in cache.features.iter().enumerate() {
                weight[c * d + k] = dc * xk;
            }
        }
        let input = self.weight.matvec_transposed(&dlogits);
        LinearGradients { weight, bias: dlogits, input }
    }
}

#[derive(Debug, Clone)]
pub struct LinearCache {
    features: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LinearGradients {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
    pub input: Vec<f64>,
}

/// Which classifier architecture to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Qml,
    Mlp,
    Linear,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Qml => "qml",
            ModelKind::Mlp => "mlp",
            ModelKind::Linear => "linear",
        }
    }
}

impl core::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qml" => Ok(ModelKind::Qml),
            "mlp" => Ok(ModelKind::Mlp),
            "linear" => Ok(ModelKind::Linear),
            _ => Err(Error::InvalidSpec("unknown model kind")),
        }
    }
}

/// A trained classifier of any kind, immutable after training.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Qml(HybridModel),
    Mlp(MlpModel),
    Linear(LinearModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Qml(_) => ModelKind::Qml,
            TrainedModel::Mlp(_) => ModelKind::Mlp,
            TrainedModel::Linear(_) => ModelKind::Linear,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Qml(m) => m.n_features(),
            TrainedModel::Mlp(m) => m.n_features(),
            TrainedModel::Linear(m) => m.n_features(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            TrainedModel::Qml(m) => m.n_classes(),
            TrainedModel::Mlp(m) => m.n_classes(),
            TrainedModel::Linear(m) => m.n_classes(),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            TrainedModel::Qml(m) => m.param_count(),
            TrainedModel::Mlp(m) => m.param_count(),
            TrainedModel::Linear(m) => m.param_count(),
        }
    }

    /// Class probabilities for one sample.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Qml(m) => Ok(m.forward(features)?.0),
            TrainedModel::Mlp(m) => Ok(m.forward(features)?.0),
            TrainedModel::Linear(m) => Ok(m.forward(features)?.0),
        }
    }

    /// Class probabilities for every row of a feature matrix.
    pub fn predict_matrix(&self, features: &Matrix) -> Result<ProbMatrix> {
        let mut out = Matrix::zeros(features.rows(), self.n_classes());
        for i in 0..features.rows() {
            let probs = self.predict(features.row(i))?;
            out.row_mut(i).copy_from_slice(&probs);
        }
        ProbMatrix::new(out)
    }

    /// ∂cross_entropy/∂features at the given sample. All kinds here are
    /// differentiable end to end.
    pub fn input_gradient(&self, features: &[f64], label: usize) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Qml(m) => {
                let (_, cache) = m.forward(features)?;
                Ok(m.backward(&cache, label).input)
            }
            TrainedModel::Mlp(m) => {
                let (_, cache) = m.forward(features)?;
                Ok(m.backward(&cache, label).input)
            }
            TrainedModel::Linear(m) => {
                let (_, cache) = m.forward(features)?;
                Ok(m.backward(&cache, label).input)
            }
        }
    }

    /// Cross-entropy of the model on one labelled sample.
    pub fn loss(&self, features: &[f64], label: usize) -> Result<f64> {
        Ok(cross_entropy(&self.predict(features)?, label))
    }
}

/// Single-step adversarial perturbation `x + ε·sign(∂loss/∂x)` with
/// `sign(0) = 0`, in the units of the (standardized) feature space.
pub fn fgsm_perturb(
    model: &TrainedModel,
    features: &[f64],
    label: usize,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let grad = model.input_gradient(features, label)?;
    Ok(features
        .iter()
        .zip(&grad)
        .map(|(&x, &g)| {
            let s = if g > 0.0 {
                1.0
            } else if g < 0.0 {
                -1.0
            } else {
                0.0
            };
            x + epsilon * s
        })
        .collect())
}
