//! Crate-wide error type.

use std::io;

/// Errors produced by table ingestion, granularity operations and reduction.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input; `line` is 1-based and counts every physical input line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The table ended up with no objects (e.g. after dropping missing rows).
    #[error("empty universe: {0}")]
    EmptyUniverse(String),

    /// An operation was invoked outside its domain.
    #[error("{0}")]
    Domain(String),

    /// A job submitted to the evaluation pool failed.
    #[error("job {index} failed: {source}")]
    Job {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Shorthand for a [`Error::Domain`] violation.
    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
