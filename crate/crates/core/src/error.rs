use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} does not fit in {digits} digits of base {base}")]
    Overflow { value: u64, base: u32, digits: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular modulo {0}")]
    SingularMatrix(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid permutation for base {base}: {msg}")]
    Validation { base: u32, msg: String },
    #[error("no permutation available for base {0}")]
    MissingPermutation(u32),
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("k_{coord} = {k} exceeds the {available} digits available in base {base}")]
    DigitBudgetExceeded { coord: usize, k: u32, base: u32, available: usize },
    #[error("network contains a cycle")]
    Cycle,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
