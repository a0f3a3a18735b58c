//! Error type shared by all solver and I/O paths.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, OwlError>;

#[derive(Debug, Error)]
pub enum OwlError {
    /// Non-finite entries, empty matrices, or out-of-range parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    /// `M = gamma*I + (1-gamma)*Z'Z` is singular or too ill-conditioned to
    /// invert at `gamma = 0`. Carries the condition estimate so the caller
    /// can decide to raise `gamma` or re-initialize.
    #[error("rank deficiency: cond(M) = {cond:.3e} exceeds the invertibility cap")]
    RankDeficient { cond: f64 },

    #[error("line search failed to find an acceptable step after {backtracks} backtracks")]
    LineSearchFailure { backtracks: usize },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("CSV parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
