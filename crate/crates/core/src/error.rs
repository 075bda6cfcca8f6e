use thiserror::Error;

/// Errors produced by the simulation core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lattice of {n} sites is too large for {what} (limit {limit})")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("basis does not contain the vacuum configuration")]
    MissingVacuum,

    #[error("operation requires a blockaded basis")]
    NotBlockaded,

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("krylov propagation did not converge: {0}")]
    Krylov(String),

    #[error("series analysis failed: {0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
