//! Small-data regression toolkit.
//!
//! - [`dataset`]: samples, CSV I/O, z-scoring, fold plans, duplicate removal
//!   and a synthetic nanorod benchmark.
//! - [`oversample`]: kNN, SMOTE, and SMOTE over every minority split of a
//!   regression dataset with the target interpolated alongside the features.
//! - [`model`]: a ReLU network with a linear output, trained by minibatch
//!   descent, with a finite-difference gradient checker and a text format.
//! - [`eval`]: MAE/MSE/R² and k-fold cross-validation.
//! - [`explain`]: LIME-style local linear explanations.
//!
//! Every randomized routine takes an explicit seed and is deterministic on a
//! given platform.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod explain;
pub mod model;
pub mod numfmt;
pub mod oversample;
pub mod seed;

pub use error::{Error, Result};
