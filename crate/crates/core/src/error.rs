use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("length mismatch: {left} t-nodes but {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid sample grid: {0}")]
    InvalidGrid(String),

    #[error("n_max = {n_max} aliases on {n_samples} samples (limit {limit})")]
    Aliasing {
        n_max: usize,
        n_samples: usize,
        limit: usize,
    },

    #[error("{got} nodes is too few, at least {need} required")]
    TooFewNodes { got: usize, need: usize },

    #[error("spectrum has no coefficient for index {0}")]
    MissingCoefficient(i64),

    #[error("index {index} out of range 0..={max}")]
    OutOfRange { index: usize, max: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
