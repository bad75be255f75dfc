//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit codes: validation failures exit with 2,
/// numerical non-convergence with 3 and resource-cap rejections with 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad channel table, bad profile,
    /// out-of-range symbol, mismatched dimensions, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// An iterative solver hit its iteration cap before reaching its
    /// stopping tolerance. Carries the best value and the stopping bound
    /// reached so callers can still inspect the partial result.
    #[error("did not converge within {iterations} iterations (best value {best_value}, gap {gap})")]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        gap: f64,
    },

    /// A configuration exceeds a deliberate desk-scale resource cap.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Format(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::ResourceCap(_) => 4,
            Error::Io(_) => 2,
        }
    }
}
