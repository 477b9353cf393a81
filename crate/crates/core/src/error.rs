use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A vertex is missing one of its four spins and cannot be classified.
    #[error("vertex ({row}, {col}) is inactive and cannot be classified")]
    InactiveVertex { row: usize, col: usize },

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("embedding failed: {0}")]
    Embedding(String),

    #[error("analysis failed: {0}")]
    Analysis(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json { context: context.into(), source }
    }

    /// Display text without the category prefix for configuration errors.
    pub(crate) fn detail(&self) -> String {
        match self {
            Error::Config(m) => m.clone(),
            e => e.to_string(),
        }
    }

    /// True for errors caused by the caller's configuration rather than by the run itself.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Lattice(_) | Error::Unsupported(_) | Error::Empty(_)
        )
    }
}
