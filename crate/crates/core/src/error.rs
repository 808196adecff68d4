use thiserror::Error;

/// Errors raised by the polarization library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("weight below its declared diagonal bound: w(x,x) = {value} < {w_min} at {point:?}")]
    CpdViolation {
        value: f64,
        w_min: f64,
        point: Vec<f64>,
    },
    #[error("exhaustive search refused: {0}")]
    BudgetRefused(String),
    #[error("constant unavailable: {0}")]
    UnavailableConstant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
