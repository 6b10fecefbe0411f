//! Crate-wide error type.
//!
//! Every hard failure carries a stable machine-parseable category (see
//! [`Error::category`]) which the CLI prints as `error[<category>]: ...`.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("source '{source_id}': digest mismatch (manifest {expected}, file {actual})")]
    DigestMismatch {
        source_id: String,
        expected: String,
        actual: String,
    },

    #[error("source '{0}' is not declared in the manifest")]
    UnknownSource(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("constraint unsatisfiable: {0}")]
    Unsatisfiable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("backend '{backend}': {message}")]
    Backend { backend: String, message: String },

    /// Transient backend failure; the retry loop consumes these.
    #[error("backend '{backend}' (transient): {message}")]
    BackendTransient {
        backend: String,
        message: String,
        /// Server-suggested delay (e.g. a Retry-After header), if any.
        retry_after_ms: Option<u64>,
    },

    #[error("run aborted: {0}")]
    Aborted(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Stable category slug for machine-parseable CLI errors.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::DigestMismatch { .. } => "digest-mismatch",
            Error::UnknownSource(_) => "unknown-source",
            Error::Parse { .. } => "parse",
            Error::EmptyResult(_) => "empty-result",
            Error::Unsatisfiable(_) => "unsatisfiable",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Backend { .. } | Error::BackendTransient { .. } => "backend",
            Error::Aborted(_) => "aborted",
        }
    }
}
