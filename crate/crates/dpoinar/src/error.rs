use std::path::PathBuf;

/// Errors from file formats, configuration and the pipelines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] dpoinar_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A malformed input file; `row` and `column` are one-based when known.
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: unsupported format version {found} (expected {expected})")]
    Version {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    /// A file whose contents do not match its own header.
    #[error("{path}: integrity check failed: {message}")]
    Integrity { path: PathBuf, message: String },
    /// A referenced input file does not exist.
    #[error("input {0} does not exist")]
    MissingInput(PathBuf),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors caused by how the program was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::MissingInput(_) | Error::Config(_))
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
