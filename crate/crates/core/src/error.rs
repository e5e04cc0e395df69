use thiserror::Error;

use crate::expr::EvalError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("index {index} out of range (maximum {max})")]
    OutOfRange { index: usize, max: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("comparison unavailable: {0}")]
    ComparisonUnavailable(String),
}

impl Error {
    /// True for errors caused by the request itself rather than by the
    /// numerics (bad parameters, missing data).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::InsufficientData(_) | Error::OutOfRange { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
