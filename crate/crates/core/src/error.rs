use std::io;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Words of different lengths or over different alphabets were combined.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed text input (words, alphabets, chain files, flags).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The sensitive word is not a feasible trajectory of the chain.
    #[error("infeasible word: transition {from} -> {to} at position {position} has zero probability")]
    Infeasible {
        from: String,
        to: String,
        position: usize,
    },

    /// No output word exists at the requested distance.
    #[error("distance class {0} is empty")]
    EmptyClass(usize),

    /// Brute-force oracle asked to enumerate beyond its cap.
    #[error("capacity exceeded: {what} has size {size}, limit is {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// Quadrature did not reach its error target.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Numeric { estimate: f64, error_bound: f64 },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Dimension(_)
            | Error::Domain(_)
            | Error::Invalid(_)
            | Error::Infeasible { .. }
            | Error::EmptyClass(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Numeric { .. } => 4,
            Error::Io(_) | Error::Csv(_) => 5,
            Error::Json(_) => 2,
        }
    }
}
