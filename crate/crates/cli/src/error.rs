use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] abelinv::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        use abelinv::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Domain { .. } => "domain",
                E::LengthMismatch { .. } => "length_mismatch",
                E::InvalidGrid(_) => "invalid_grid",
                E::Aliasing { .. } => "aliasing",
                E::TooFewNodes { .. } => "too_few_nodes",
                E::MissingCoefficient(_) => "missing_coefficient",
                E::OutOfRange { .. } => "out_of_range",
                E::InvalidParameter { .. } => "invalid_parameter",
            },
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
