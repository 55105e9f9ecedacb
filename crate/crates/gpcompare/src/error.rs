use std::path::PathBuf;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or unusable input data.
    #[error("{}: {msg}", path.display())]
    Data { path: PathBuf, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] gpcompare_core::Error),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        CliError::Data {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
