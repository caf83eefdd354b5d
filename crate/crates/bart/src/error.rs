use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BartError>;

#[derive(Debug, Error)]
pub enum BartError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("outcome column '{0}' not found in header")]
    OutcomeColumnMissing(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid tree edit: {0}")]
    InvalidEdit(String),

    #[error("draw store: {0}")]
    DrawStore(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
}

impl BartError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BartError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        BartError::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
