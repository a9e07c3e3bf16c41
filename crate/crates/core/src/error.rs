//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mode index {index} out of range for {n_modes} modes")]
    ModeIndexOutOfRange { index: usize, n_modes: usize },

    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,

    #[error("squeezing parameter must be positive, got {0}")]
    NonPositiveSqueezing(f64),

    #[error("noise matrix is not positive semidefinite")]
    NoiseNotPsd,

    #[error("measured quadrature variance {0} is not positive")]
    MeasuredVarianceNotPositive(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid mode subset for partial transpose")]
    InvalidModeSet,

    #[error("party count must be at least 2, got {0}")]
    InvalidPartyCount(usize),

    #[error("variance parameter {name} must be positive, got {value}")]
    NonPositiveVariance { name: &'static str, value: f64 },

    #[error("target ratio {name} must be positive and finite, got {value}")]
    InvalidTargetRatio { name: &'static str, value: f64 },

    #[error("state is not physical")]
    UnphysicalState,

    #[error("gain convention requires c > 0 and d > 0 (got c={c}, d={d})")]
    GainConvention { c: f64, d: f64 },

    #[error("no physical (c, d) region to sample for the given (m, n)")]
    EmptyRegion,

    #[error("transmittance T must lie in [0, 1], got {0}")]
    InvalidTransmittance(f64),

    #[error("eigensolver did not converge")]
    EigenNotConverged,
}
