use thiserror::Error;

use crate::solver::SolveTrace;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("iterates diverged at gradient step {iteration}")]
    Diverged {
        iteration: usize,
        /// Trace up to and including the last finite iterate.
        trace: Box<SolveTrace>,
    },

    #[error("dense ensemble of {entries} entries exceeds the limit of {limit}")]
    MemoryGuard { entries: u128, limit: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
