use alloc::boxed::Box;
use alloc::string::String;

use crate::hilbert::ProductVector;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block count mismatch: expected {expected} blocks, found {found}")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("iteration produced a non-finite value at step {step}")]
    Diverged {
        step: usize,
        /// Last iterate whose coordinates were all finite.
        last_finite: Box<ProductVector>,
    },
    #[error("rate estimation needs at least {needed} residuals, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("rate estimation needs strictly positive residuals")]
    NonPositiveResidual,
    #[error("no samples of the intersection were supplied; the oracle projector is unavailable")]
    OracleUnavailable,
    #[error("set is required to be affine")]
    NotAffine,
    #[error("operator needs a {expected} reformulation")]
    WrongReformulation { expected: &'static str },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("cascade iteration diverged (|value| exceeded {limit:e})")]
    CascadeDiverged { limit: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
