use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("label must be 0 or 1, got {0}")]
    InvalidLabel(u8),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("vector is not unit norm (norm = {0})")]
    NotUnit(f64),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample is not realizable: {0}")]
    Unrealizable(String),

    #[error("size policy exceeded: {0}")]
    PolicyExceeded(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("attack context mismatch: {0}")]
    Context(String),

    #[error("inconclusive audit: {0}")]
    Inconclusive(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
