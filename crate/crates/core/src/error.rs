use thiserror::Error;

/// Errors produced by the spectral, boundary and dynamics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge for eigenvalue index {index}")]
    SolverFailure { index: usize },

    #[error("matrix is not symmetric (largest asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("truncation n_max = {n_max} is inadequate: {reason}")]
    Truncation { n_max: usize, reason: String },

    #[error("{quantity} evaluated outside its domain: {detail}")]
    Domain { quantity: &'static str, detail: String },

    #[error("threshold delta = {delta} exceeds the last maximum of the splitting for n = {n}")]
    ThresholdTooLarge { n: u32, delta: f64 },

    #[error("crossing sensitivity is singular at alpha = {alpha}")]
    SingularSensitivity { alpha: f64 },

    #[error("least-squares fit failed: {0}")]
    FitFailure(String),

    #[error("point (g = {g}, E = {energy}) satisfies both perturbative conditions")]
    InconsistentRegions { g: f64, energy: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state has no definite parity (opposite-parity weight {weight:e})")]
    IndefiniteParity { weight: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
