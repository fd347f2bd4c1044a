//! Model checkpoints: JSON documents holding kind, dimensions, seed, train
//! config, the fitted feature scaler and every parameter array in row-major
//! order with explicit shapes. Values round-trip bit-exactly because floats
//! are serialized as shortest-round-trip decimal strings.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use vqsafe_core::eval::Scaler;
use vqsafe_core::matrix::Matrix;
use vqsafe_core::model::{HybridModel, LinearModel, MlpModel, OutputHead, PreLayer, TrainedModel};
use vqsafe_core::quantum::{CircuitLayout, RotationParams};
use vqsafe_core::train::TrainConfig;

pub const BIT_CONVENTION: &str = "qubit0-msb";

#[derive(Debug)]
pub enum CheckpointError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Schema(String),
}

impl fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckpointError::Io(e) => write!(f, "io: {}", e),
            CheckpointError::Json(e) => write!(f, "json: {}", e),
            CheckpointError::Schema(msg) => write!(f, "checkpoint schema: {}", msg),
        }
    }
}

impl std::error::Error for CheckpointError {}

impl From<std::io::Error> for CheckpointError {
    fn from(e: std::io::Error) -> Self {
        CheckpointError::Io(e)
    }
}

impl From<serde_json::Error> for CheckpointError {
    fn from(e: serde_json::Error) -> Self {
        CheckpointError::Json(e)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainConfigJson {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub l2_strength: f64,
}

impl TrainConfigJson {
    pub fn from_config(config: &TrainConfig) -> Self {
        TrainConfigJson {
            learning_rate: config.learning_rate,
            batch_size: config.batch_size,
            epochs: config.epochs,
            adam_beta1: config.adam_beta1,
            adam_beta2: config.adam_beta2,
            adam_epsilon: config.adam_epsilon,
            l2_strength: config.l2_strength,
        }
    }

    pub fn to_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            adam_beta1: self.adam_beta1,
            adam_beta2: self.adam_beta2,
            adam_epsilon: self.adam_epsilon,
            l2_strength: self.l2_strength,
            seed,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Dims {
    n_features: usize,
    n_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hidden_width: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CircuitJson {
    entangler_range: usize,
    bit_convention: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScalerJson {
    mean: Vec<f64>,
    std: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamArray {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    kind: String,
    seed: u64,
    config: TrainConfigJson,
    dims: Dims,
    #[serde(skip_serializing_if = "Option::is_none")]
    circuit: Option<CircuitJson>,
    scaler: ScalerJson,
    params: Vec<ParamArray>,
}

/// A trained model together with the scaler that standardizes its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredModel {
    pub model: TrainedModel,
    pub scaler: Scaler,
    pub seed: u64,
    pub config: TrainConfigJson,
}

fn matrix_param(name: &str, m: &Matrix) -> ParamArray {
    ParamArray { name: name.into(), shape: vec![m.rows(), m.cols()], data: m.data().to_vec() }
}

fn vector_param(name: &str, v: &[f64]) -> ParamArray {
    ParamArray { name: name.into(), shape: vec![v.len()], data: v.to_vec() }
}

pub fn save_model(stored: &StoredModel, path: &Path) -> Result<(), CheckpointError> {
    let (dims, circuit, params) = match &stored.model {
        TrainedModel::Qml(m) => (
            Dims {
                n_features: m.n_features(),
                n_classes: m.n_classes(),
                n_qubits: Some(m.layout.n_qubits),
                hidden_width: None,
            },
            Some(CircuitJson {
                entangler_range: m.layout.entangler_range,
                bit_convention: BIT_CONVENTION.into(),
            }),
            vec![
                matrix_param("pre_weight", &m.pre.weight),
                vector_param("pre_bias", &m.pre.bias),
                ParamArray {
                    name: "rotation_angles".into(),
                    shape: vec![m.layout.n_qubits, 3],
                    data: m.rotations.angles().to_vec(),
                },
                matrix_param("head_weight", &m.head.weight),
                vector_param("head_bias", &m.head.bias),
            ],
        ),
        TrainedModel::Mlp(m) => (
            Dims {
                n_features: m.n_features(),
                n_classes: m.n_classes(),
                n_qubits: None,
                hidden_width: Some(m.hidden_width()),
            },
            None,
            vec![
                matrix_param("w1", &m.w1),
                vector_param("b1", &m.b1),
                matrix_param("w2", &m.w2),
                vector_param("b2", &m.b2),
            ],
        ),
        TrainedModel::Linear(m) => (
            Dims {
                n_features: m.n_features(),
                n_classes: m.n_classes(),
                n_qubits: None,
                hidden_width: None,
            },
            None,
            vec![matrix_param("weight", &m.weight), vector_param("bias", &m.bias)],
        ),
    };
    let checkpoint = Checkpoint {
        kind: stored.model.kind().as_str().into(),
        seed: stored.seed,
        config: stored.config.clone(),
        dims,
        circuit,
        scaler: ScalerJson { mean: stored.scaler.mean.clone(), std: stored.scaler.std.clone() },
        params,
    };
    let mut text = serde_json::to_string_pretty(&checkpoint)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn take_matrix(params: &[ParamArray], name: &str, rows: usize, cols: usize) -> Result<Matrix, CheckpointError> {
    let p = params
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CheckpointError::Schema(format!("missing parameter array {:?}", name)))?;
    if p.shape != [rows, cols] || p.data.len() != rows * cols {
        return Err(CheckpointError::Schema(format!(
            "{:?} has shape {:?}, expected [{}, {}]",
            name, p.shape, rows, cols
        )));
    }
    Ok(Matrix::from_vec(rows, cols, p.data.clone()))
}

fn take_vector(params: &[ParamArray], name: &str, len: usize) -> Result<Vec<f64>, CheckpointError> {
    let p = params
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CheckpointError::Schema(format!("missing parameter array {:?}", name)))?;
    if p.shape != [len] || p.data.len() != len {
        return Err(CheckpointError::Schema(format!(
            "{:?} has shape {:?}, expected [{}]",
            name, p.shape, len
        )));
    }
    Ok(p.data.clone())
}

pub fn load_model(path: &Path) -> Result<StoredModel, CheckpointError> {
    let text = fs::read_to_string(path)?;
    let ckpt: Checkpoint = serde_json::from_str(&text)?;
    let d = ckpt.dims.n_features;
    let n_classes = ckpt.dims.n_classes;
    if ckpt.scaler.mean.len() != d || ckpt.scaler.std.len() != d {
        return Err(CheckpointError::Schema("scaler length does not match n_features".into()));
    }

    let model = match ckpt.kind.as_str() {
        "qml" => {
            let n = ckpt
                .dims
                .n_qubits
                .ok_or_else(|| CheckpointError::Schema("qml checkpoint lacks n_qubits".into()))?;
            let circuit = ckpt
                .circuit
                .as_ref()
                .ok_or_else(|| CheckpointError::Schema("qml checkpoint lacks circuit".into()))?;
            if circuit.bit_convention != BIT_CONVENTION {
                return Err(CheckpointError::Schema(format!(
                    "unsupported bit convention {:?}",
                    circuit.bit_convention
                )));
            }
            let dim = 1usize << n;
            let pre = PreLayer {
                weight: take_matrix(&ckpt.params, "pre_weight", dim, d)?,
                bias: take_vector(&ckpt.params, "pre_bias", dim)?,
            };
            let angles = {
                let p = ckpt
                    .params
                    .iter()
                    .find(|p| p.name == "rotation_angles")
                    .ok_or_else(|| CheckpointError::Schema("missing rotation_angles".into()))?;
                if p.shape != [n, 3] {
                    return Err(CheckpointError::Schema("rotation_angles shape mismatch".into()));
                }
                p.data.clone()
            };
            let rotations = RotationParams::new(n, angles)
                .map_err(|e| CheckpointError::Schema(e.to_string()))?;
            let head = OutputHead {
                weight: take_matrix(&ckpt.params, "head_weight", n_classes, n)?,
                bias: take_vector(&ckpt.params, "head_bias", n_classes)?,
            };
            let layout =
                CircuitLayout { n_qubits: n, entangler_range: circuit.entangler_range };
            TrainedModel::Qml(
                HybridModel::new(pre, rotations, layout, head)
                    .map_err(|e| CheckpointError::Schema(e.to_string()))?,
            )
        }
        "mlp" => {
            let h = ckpt
                .dims
                .hidden_width
                .ok_or_else(|| CheckpointError::Schema("mlp checkpoint lacks hidden_width".into()))?;
            TrainedModel::Mlp(MlpModel {
                w1: take_matrix(&ckpt.params, "w1", h, d)?,
                b1: take_vector(&ckpt.params, "b1", h)?,
                w2: take_matrix(&ckpt.params, "w2", n_classes, h)?,
                b2: take_vector(&ckpt.params, "b2", n_classes)?,
            })
        }
        "linear" => TrainedModel::Linear(LinearModel {
            weight: take_matrix(&ckpt.params, "weight", n_classes, d)?,
            bias: take_vector(&ckpt.params, "bias", n_classes)?,
        }),
        other => return Err(CheckpointError::Schema(format!("unknown model kind {:?}", other))),
    };

    Ok(StoredModel {
        model,
        scaler: Scaler { mean: ckpt.scaler.mean, std: ckpt.scaler.std },
        seed: ckpt.seed,
        config: ckpt.config,
    })
}
