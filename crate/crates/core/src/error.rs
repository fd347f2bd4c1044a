//! Crate-wide error type.

use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by simulator, model, metric and evaluation code.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input vector norm is at or below the 1e-30 threshold; amplitude
    /// encoding would divide by (near) zero.
    ZeroVector,
    /// More input components than the register can hold.
    DimensionOverflow { dim: usize, capacity: usize },
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    ControlEqualsTarget { qubit: usize },
    ShapeMismatch { expected: usize, got: usize },
    NonFiniteValue,
    EmptyDataset,
    LabelOutOfRange { index: usize, label: usize, n_classes: usize },
    EmptyInput,
    /// Gini index needs nonnegative values with a positive mean.
    NonPositiveMean,
    /// Rank-graduation denominator vanishes when the reference is constant.
    ConstantReference,
    /// A split (or what remains of one) holds fewer than two classes.
    SingleClassSplit,
    /// A curve grid with fewer than two points or non-ascending levels.
    DegenerateGrid,
    /// A probability row that does not sum to 1 or leaves [0, 1].
    InvalidProbability { row: usize },
    ClassTooSmall { class: usize, count: usize, k: usize },
    NonDifferentiableModel,
    InvalidSpec(&'static str),
    /// A cross-validation fold failed; carries the fold index and the cause.
    FoldFailed { fold: usize, cause: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroVector => write!(f, "input vector has (near) zero norm"),
            Error::DimensionOverflow { dim, capacity } => {
                write!(f, "input dimension {} exceeds register capacity {}", dim, capacity)
            }
            Error::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit index {} out of range for {} qubits", qubit, n_qubits)
            }
            Error::ControlEqualsTarget { qubit } => {
                write!(f, "CNOT control and target are both qubit {}", qubit)
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {}, got {}", expected, got)
            }
            Error::NonFiniteValue => write!(f, "non-finite value encountered"),
            Error::EmptyDataset => write!(f, "dataset has no samples"),
            Error::LabelOutOfRange { index, label, n_classes } => {
                write!(f, "label {} at sample {} out of range for {} classes", label, index, n_classes)
            }
            Error::EmptyInput => write!(f, "empty input"),
            Error::NonPositiveMean => write!(f, "gini index needs a positive mean"),
            Error::ConstantReference => write!(f, "reference values are constant"),
            Error::SingleClassSplit => write!(f, "split contains fewer than two classes"),
            Error::DegenerateGrid => write!(f, "grid needs at least two strictly ascending levels"),
            Error::InvalidProbability { row } => {
                write!(f, "row {} is not a probability distribution", row)
            }
            Error::ClassTooSmall { class, count, k } => {
                write!(f, "class {} has {} samples, fewer than {} folds", class, count, k)
            }
            Error::NonDifferentiableModel => write!(f, "model does not expose input gradients"),
            Error::InvalidSpec(reason) => write!(f, "invalid specification: {}", reason),
            Error::FoldFailed { fold, cause } => write!(f, "fold {} failed: {}", fold, cause),
        }
    }
}

impl core::error::Error for Error {}
