use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition {parts:?}: {reason}")]
    InvalidPartition {
        parts: Vec<u64>,
        reason: &'static str,
    },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(&'static str),

    #[error("parameter `{name}` = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("reference function is not weakly decreasing")]
    NonMonotoneReference,

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: u64, found: u64 },

    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("linear solve failed: {0}")]
    Solver(&'static str),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T: std::fmt::Display>(
    name: &'static str,
    value: T,
    expected: &'static str,
) -> Error {
    Error::Domain {
        name,
        value: value.to_string(),
        expected,
    }
}
