use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("point cloud has {n} points, above the degree-1 cap of {cap}; subsample before computing loops")]
    TooManyPoints { n: usize, cap: usize },

    #[error("diagram death {max_death} exceeds landscape domain end {domain_end}")]
    Truncation { max_death: f64, domain_end: f64 },

    #[error("warp is not strictly increasing at index {index}")]
    NonMonotoneWarp { index: usize },

    #[error("pair ({birth}, {death}) lies outside [0, 1] after normalization")]
    OutOfDomain { birth: f64, death: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
