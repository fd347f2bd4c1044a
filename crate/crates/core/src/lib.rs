//! Hybrid classical–quantum classification with rank-graduation reliability
//! metrics.
//!
//! The crate bundles four pieces that are usually scattered across a research
//! codebase:
//!
//! * a dense statevector simulator with exact reverse-mode gradients
//!   ([`quantum`]),
//! * the hybrid classifier (linear + GELU front end, amplitude encoding, one
//!   strongly entangling layer, Pauli-Z readout, linear head) together with
//!   classical MLP and logistic-regression baselines and a shared Adam
//!   training loop ([`model`], [`train`]),
//! * the RG metric family built on the Cramér–von Mises divergence: RGA,
//!   RGR, RGE, their perturbation curves and area summaries ([`metrics`],
//!   [`perturb`]),
//! * stratified cross-validation orchestration producing mean ± std reports
//!   ([`eval`]).
//!
//! Everything is deterministic given a seed and runs on `no_std` with `alloc`;
//! file formats and the command line live in the companion `vqsafe-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod eval;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod perturb;
pub mod quantum;
pub mod seed;
pub mod synthetic;
pub mod train;

pub use error::{Error, Result};
pub use matrix::Matrix;
