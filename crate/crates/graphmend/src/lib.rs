//! Recovery of time-varying signals on spatial graphs from partial, noisy
//! observations.
//!
//! A signal matrix `X` (rows = graph vertices, columns = time instances) is
//! reconstructed from masked measurements `Y = J .* X + noise` by trading
//! off data fidelity against two structural priors: high-order smoothness of
//! the signal over the graph and across time, expressed through a
//! fractional-order temporal difference and a positive-definite power of the
//! graph Laplacian, and adaptive low-rankness, expressed through an
//! error-function weighted nuclear norm whose weights are recomputed from
//! the running iterate.
//!
//! The crate is organized around the pipeline:
//!
//! - [`graph`]: kNN graph construction, Laplacians, spectral transforms.
//! - [`temporal`]: fractional-order forward differences and temporal
//!   Laplacians.
//! - [`lowrank`]: ERF norm, adaptive weights, weighted singular value
//!   thresholding.
//! - [`solver`]: the unified recovery model, two ADMM algorithms, and a
//!   closed-form quadratic solver for the smoothness-only baselines.
//! - [`synth`]: reproducible synthetic signals, masks and noise.
//! - [`datasets`]: CSV loaders for real spatio-temporal data.
//! - [`harness`]: experiment plans, grid search, RMSE, result tables.
//!
//! See the crate examples for end-to-end usage; the `graphmend` binary
//! exposes the same flows on the command line.

pub mod datasets;
mod error;
pub mod graph;
pub mod harness;
pub mod lowrank;
pub mod solver;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
