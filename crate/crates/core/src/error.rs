//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("area correction did not converge within {iterations} steps (relative area error {relative_error:.6})")]
    NonConvergence { iterations: usize, relative_error: f64 },

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("data error: {0}")]
    Data(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Infeasible(_) | Error::NonConvergence { .. } => 3,
            Error::Parse { .. }
            | Error::EmptyDataset
            | Error::Data(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Io { .. } => 4,
            Error::Numerical(_) => 1,
        }
    }
}
