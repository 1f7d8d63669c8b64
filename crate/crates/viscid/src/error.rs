//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("control magnitude {norm} exceeds the unit bound")]
    ControlTooLarge { norm: f64 },

    #[error("negative time step {dt}")]
    NegativeTimeStep { dt: f64 },

    #[error("argument {x} outside the domain of the {branch} Lambert branch")]
    LambertDomain { branch: &'static str, x: f64 },

    #[error("adjoint terminal vectors are both zero")]
    ZeroAdjoint,

    #[error("extremal control is singular at the switching instant t = {t}")]
    SingularInstant { t: f64 },

    #[error("invalid coordinate index {index} for state dimension {state_dim}")]
    InvalidCoordinate { index: usize, state_dim: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("trajectory violates its declared Lipschitz constant {lip}: slope {slope} on [{t0}, {t1}]")]
    LipschitzViolation { lip: f64, slope: f64, t0: f64, t1: f64 },

    #[error("trajectory samples must have strictly increasing times starting at 0 (row {row})")]
    NonMonotoneTime { row: usize },

    #[error("no bracket found around t0 = {t0}; run more fixed-point iterations first")]
    NoBracket { t0: f64 },

    #[error("malformed input file: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
