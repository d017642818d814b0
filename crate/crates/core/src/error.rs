use alloc::string::String;

/// Errors raised by the fitting pipeline and its numeric kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("data set is empty")]
    EmptyData,
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("value {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("node limit of {nodes} reached with optimality gap {gap:e}")]
    NodeLimitExceeded { nodes: usize, gap: f64 },
    #[error("instance too large for enumeration: n = {n}, cap = {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
