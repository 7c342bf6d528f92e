//! Fully-visible Boltzmann machines over `±1` data.
//!
//! * [`exact`]: probability mass function, normalizing constant, marginals and
//!   sampling by enumerating all `2^d` states.
//! * [`pseudolikelihood`]: conditional probabilities and the log-pseudolikelihood
//!   with analytic score and Hessian.
//! * [`mple`]: the block minorization–maximization fitter.
//! * [`inference`]: sandwich standard errors, Wald tests and FDR adjustment.
//! * [`votes`]: turning party-level division records into agreement data.
//! * [`graph`]: significance networks in DOT and JSON.

pub mod error;
pub mod exact;
pub mod graph;
pub mod inference;
mod json;
pub mod mple;
pub mod params;
pub mod pseudolikelihood;
pub mod votes;

pub use error::{Error, Result};
pub use exact::{enumerate_pmf, PairwiseJoint, PmfTable, ENUMERATION_CAP};
pub use inference::{build_report, AdjustmentGroups, FdrMethod, InferenceReport};
pub use json::format_f64;
pub use mple::{fit, FitConfig, FitResult, Init};
pub use params::{FlatLayout, FvbmParams, SpinMatrix, SpinVector};
