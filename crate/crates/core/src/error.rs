use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("format error in record {record}: {message}")]
    Record { record: usize, message: String },

    #[error("structure error in sentence {sentence}: {message}")]
    Structure { sentence: String, message: String },

    #[error("size error: {0}")]
    Size(String),

    #[error("state error: {0}")]
    State(String),

    #[error("shape error: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("missing embeddings for documents: {}", .0.join(", "))]
    Coverage(Vec<String>),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("training diverged at epoch {epoch} (learning rate {learning_rate:?})")]
    Divergence { epoch: usize, learning_rate: f64 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub fn record(record: usize, message: impl Into<String>) -> Self {
        Error::Record {
            record,
            message: message.into(),
        }
    }

    /// Process exit code for this error class: 2 for data and format
    /// problems, 3 for numerical divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } => 3,
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}
