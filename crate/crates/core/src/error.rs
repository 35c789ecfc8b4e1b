use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::TemplateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty sentence")]
    EmptySentence,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("phrase bank for template {0} is empty")]
    EmptyPhraseBank(TemplateId),

    #[error("taxonomy has no entity of type {0}")]
    MissingEntityType(String),

    #[error("unknown job id {0:?}")]
    UnknownJob(String),

    #[error("job is missing feature {0:?}")]
    MissingFeature(String),

    #[error("invalid value: {0}")]
    Invalid(String),

    #[error("model file format mismatch: {0}")]
    Format(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
