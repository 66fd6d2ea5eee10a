use thiserror::Error;

/// Errors produced by simulators, optimizers and search loops.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("non-finite loss for perturbation {index}")]
    NonFiniteLoss { index: usize },

    #[error("non-finite gradient passed to optimizer")]
    NonFiniteGradient,

    #[error("coincident spring endpoints (spring {spring}, step {step})")]
    CoincidentEndpoints { spring: usize, step: usize },

    #[error("gap multiplier out of range [0.5, 2.0]: {field} = {value}")]
    GapOutOfRange { field: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
