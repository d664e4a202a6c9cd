use thiserror::Error;

/// Errors raised by the simulation and verification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlevyError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid of {nodes} nodes exceeds the configured cap of {cap}")]
    GridTooLarge { nodes: usize, cap: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time {time} is not a grid node")]
    OffGrid { time: f64 },

    #[error("window not covered: {0}")]
    WindowNotCovered(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {intervals} subintervals")]
    Quadrature {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("value outside the state space: {0}")]
    StateSpace(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, FlevyError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> FlevyError {
    FlevyError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
