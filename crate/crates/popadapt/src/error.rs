//! Library-wide error type.

use thiserror::Error;

/// Errors surfaced by parsing, validation, fitting, and the experiment loop.
#[derive(Debug, Error)]
pub enum Error {
    /// A malformed cell, header, or line in a dataset CSV or config file.
    /// Carries enough position information to locate the offending input.
    #[error("{path}:{line}: {message}")]
    Format {
        /// File (or pseudo-file) the input came from.
        path: String,
        /// 1-based line number.
        line: usize,
        /// What was wrong, naming the column/key where applicable.
        message: String,
    },

    /// A structurally valid input that violates a documented precondition
    /// (out-of-range fraction, unknown dataset name, mixture not summing
    /// to one, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Underlying filesystem failure, annotated with the path.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Format error helper with positional context.
    pub fn format(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), line, message: message.into() }
    }

    /// Precondition-violation helper.
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// IO error helper with path context.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
