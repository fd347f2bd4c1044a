//! Shared Adam training loop for all model kinds.
//!
//! Determinism contract: a single ChaCha8 generator seeded from
//! `TrainConfig::seed` first draws the initial parameters (weights row-major,
//! uniform in ±1/√fan_in; rotation angles uniform in [0, 2π); biases zero)
//! and is then reused for the per-epoch shuffles, so identical
//! (kind, data, config) always yields bitwise-identical trained parameters.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolves float math under no_std
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::Dataset;
use crate::matrix::Matrix;
use crate::model::{
    n_qubits_for_features, HybridModel, LinearModel, MlpModel, ModelKind, OutputHead, PreLayer,
    TrainedModel,
};
use crate::quantum::{CircuitLayout, RotationParams};

/// Optimizer and loop hyperparameters.
///
/// `l2_strength` penalizes the weight matrix of the linear baseline only;
/// the QML and MLP kinds train without weight decay.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub l2_strength: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 3e-3,
            batch_size: 32,
            epochs: 20,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            l2_strength: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidSpec("learning rate, batch size and epochs must be positive"));
        }
        Ok(())
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState { m: vec![0.0; dim], v: vec![0.0; dim], step: 0 }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update across parameter groups.
///
/// Groups are concatenated in order against the optimizer state; the step
/// counter ticks once per call.
pub fn adam_step(
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
    state: &mut AdamState,
    config: &TrainConfig,
) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::ShapeMismatch { expected: params.len(), got: grads.len() });
    }
    let total: usize = params.iter().map(|p| p.len()).sum();
    if total != state.m.len() {
        return Err(Error::ShapeMismatch { expected: state.m.len(), got: total });
    }
    for (p, g) in params.iter().zip(grads) {
        if p.len() != g.len() {
            return Err(Error::ShapeMismatch { expected: p.len(), got: g.len() });
        }
    }

    state.step += 1;
    let b1 = config.adam_beta1;
    let b2 = config.adam_beta2;
    let bc1 = 1.0 - b1.powi(state.step as i32);
    let bc2 = 1.0 - b2.powi(state.step as i32);

    let mut offset = 0;
    for (group, grad) in params.iter_mut().zip(grads) {
        for (i, (p, &g)) in group.iter_mut().zip(grad.iter()).enumerate() {
            let k = offset + i;
            state.m[k] = b1 * state.m[k] + (1.0 - b1) * g;
            state.v[k] = b2 * state.v[k] + (1.0 - b2) * g * g;
            let m_hat = state.m[k] / bc1;
            let v_hat = state.v[k] / bc2;
            *p -= config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_epsilon);
        }
        offset += group.len();
    }
    Ok(())
}

fn uniform_vec(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-bound..bound)).collect()
}

fn angle_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0.0..core::f64::consts::TAU)).collect()
}

/// Freshly initialized (untrained) model of the given kind and shape.
pub fn init_model(
    kind: ModelKind,
    n_features: usize,
    n_classes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TrainedModel> {
    if n_classes < 2 {
        return Err(Error::SingleClassSplit);
    }
    let d = n_features;
    let bound_d = 1.0 / (d as f64).sqrt();
    match kind {
        ModelKind::Qml => {
            let n = n_qubits_for_features(d);
            let dim = 1usize << n;
            let pre = PreLayer {
                weight: Matrix::from_vec(dim, d, uniform_vec(rng, dim * d, bound_d)),
                bias: vec![0.0; dim],
            };
            let rotations = RotationParams::new(n, angle_vec(rng, n * 3))?;
            let bound_n = 1.0 / (n as f64).sqrt();
            let head = OutputHead {
                weight: Matrix::from_vec(n_classes, n, uniform_vec(rng, n_classes * n, bound_n)),
                bias: vec![0.0; n_classes],
            };
            Ok(TrainedModel::Qml(HybridModel::new(pre, rotations, CircuitLayout::ring(n), head)?))
        }
        ModelKind::Mlp => {
            let hidden = d;
            let bound_h = 1.0 / (hidden as f64).sqrt();
            Ok(TrainedModel::Mlp(MlpModel {
                w1: Matrix::from_vec(hidden, d, uniform_vec(rng, hidden * d, bound_d)),
                b1: vec![0.0; hidden],
                w2: Matrix::from_vec(n_classes, hidden, uniform_vec(rng, n_classes * hidden, bound_h)),
                b2: vec![0.0; n_classes],
            }))
        }
        ModelKind::Linear => Ok(TrainedModel::Linear(LinearModel {
            weight: Matrix::from_vec(n_classes, d, uniform_vec(rng, n_classes * d, bound_d)),
            bias: vec![0.0; n_classes],
        })),
    }
}

/// Parameter-group plumbing shared by the training loop.
trait Trainable {
    /// Gradient of the per-sample cross-entropy, one flat buffer per
    /// parameter group, ordered like [`Trainable::param_groups_mut`].
    fn grad_groups(&self, x: &[f64], y: usize) -> Result<Vec<Vec<f64>>>;
    fn param_groups(&self) -> Vec<&[f64]>;
    fn param_groups_mut(&mut self) -> Vec<&mut [f64]>;
    /// Indices of groups the L2 penalty applies to.
    fn l2_groups(&self) -> &'static [usize] {
        &[]
    }
}

impl Trainable for HybridModel {
    fn grad_groups(&self, x: &[f64], y: usize) -> Result<Vec<Vec<f64>>> {
        let (_, cache) = self.forward(x)?;
        let g = self.backward(&cache, y);
        Ok(vec![g.pre_weight, g.pre_bias, g.angles, g.head_weight, g.head_bias])
    }

    fn param_groups(&self) -> Vec<&[f64]> {
        vec![
            self.pre.weight.data(),
            &self.pre.bias,
            self.rotations.angles(),
            self.head.weight.data(),
            &self.head.bias,
        ]
    }

    fn param_groups_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.pre.weight.data_mut(),
            &mut self.pre.bias,
            self.rotations.angles_mut(),
            self.head.weight.data_mut(),
            &mut self.head.bias,
        ]
    }
}

impl Trainable for MlpModel {
    fn grad_groups(&self, x: &[f64], y: usize) -> Result<Vec<Vec<f64>>> {
        let (_, cache) = self.forward(x)?;
        let g = self.backward(&cache, y);
        Ok(vec![g.w1, g.b1, g.w2, g.b2])
    }

    fn param_groups(&self) -> Vec<&[f64]> {
        vec![self.w1.data(), &self.b1, self.w2.data(), &self.b2]
    }

    fn param_groups_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.w1.data_mut(), &mut self.b1, self.w2.data_mut(), &mut self.b2]
    }
}

impl Trainable for LinearModel {
    fn grad_groups(&self, x: &[f64], y: usize) -> Result<Vec<Vec<f64>>> {
        let (_, cache) = self.forward(x)?;
        let g = self.backward(&cache, y);
        Ok(vec![g.weight, g.bias])
    }

    fn param_groups(&self) -> Vec<&[f64]> {
        vec![self.weight.data(), &self.bias]
    }

    fn param_groups_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.weight.data_mut(), &mut self.bias]
    }

    fn l2_groups(&self) -> &'static [usize] {
        &[0]
    }
}

fn train_loop<M: Trainable>(
    model: &mut M,
    data: &Dataset,
    config: &TrainConfig,
    l2: f64,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let n = data.len();
    let total: usize = model.param_groups().iter().map(|g| g.len()).sum();
    let mut adam = AdamState::new(total);
    let mut order: Vec<usize> = (0..n).collect();

    for _ in 0..config.epochs {
        order.shuffle(rng);
        for batch in order.chunks(config.batch_size) {
            let mut acc: Vec<Vec<f64>> =
                model.param_groups().iter().map(|g| vec![0.0; g.len()]).collect();
            for &i in batch {
                let sample = model.grad_groups(data.features().row(i), data.labels()[i])?;
                for (a, s) in acc.iter_mut().zip(&sample) {
                    for (av, sv) in a.iter_mut().zip(s) {
                        *av += sv;
                    }
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for a in &mut acc {
                for v in a.iter_mut() {
                    *v *= scale;
                }
            }
            if l2 > 0.0 {
                let groups = model.param_groups();
                for &gi in model.l2_groups() {
                    for (av, &w) in acc[gi].iter_mut().zip(groups[gi]) {
                        *av += 2.0 * l2 * w;
                    }
                }
            }
            let grad_refs: Vec<&[f64]> = acc.iter().map(Vec::as_slice).collect();
            adam_step(&mut model.param_groups_mut(), &grad_refs, &mut adam, config)?;
        }
    }
    Ok(())
}

/// Train a model of the given kind on (already standardized) features.
pub fn train_model(kind: ModelKind, train: &Dataset, config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = init_model(kind, train.n_features(), train.n_classes(), &mut rng)?;
    let l2 = if kind == ModelKind::Linear { config.l2_strength } else { 0.0 };
    match &mut model {
        TrainedModel::Qml(m) => train_loop(m, train, config, l2, &mut rng)?,
        TrainedModel::Mlp(m) => train_loop(m, train, config, l2, &mut rng)?,
        TrainedModel::Linear(m) => train_loop(m, train, config, l2, &mut rng)?,
    }
    Ok(model)
}
