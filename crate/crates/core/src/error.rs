use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("month {month} is out of range (dataset starts at {start})")]
    MonthRange { start: String, month: String },

    #[error("cannot parse calendar month {0:?} (expected YYYY-MM)")]
    MonthParse(String),

    #[error("ingestion error in {file}, row {row}: {message}")]
    Ingest {
        file: PathBuf,
        row: usize,
        message: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("embedding error for prompt {key}: {message}")]
    Embedding { key: String, message: String },

    #[error("training error: {0}")]
    Train(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("toml error: {0}")]
    Toml(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
