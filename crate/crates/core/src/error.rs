use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// `index` is 1-based.
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("index {index} is outside the defined range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} is limited to {limit}, got {got}")]
    GuardExceeded { what: &'static str, limit: usize, got: usize },

    #[error("tie enumeration would produce {needed} orderings, cap is {cap}")]
    TieCapExceeded { needed: u128, cap: usize },

    #[error("m = {m} is out of range 0..={dim}")]
    MOutOfRange { m: usize, dim: usize },

    #[error("truncation level must be positive, got {0}")]
    NonPositiveLevel(f64),

    #[error("Chebyshev solver could not certify tolerance {tol} on a support of size {support} after {rounds} rounds")]
    NotCertified { tol: f64, support: usize, rounds: usize },

    #[error("invalid set function: {0}")]
    InvalidSetFunction(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
