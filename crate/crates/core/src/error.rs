//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, solver configuration and the
/// experiment/CLI layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric field violates its documented range.
    #[error("{field} must be in {constraint}, got {value}")]
    InvalidParameter {
        field: String,
        constraint: String,
        value: String,
    },

    /// Two nodes that share a radio link coincide, so the d^-2 path loss
    /// is undefined.
    #[error("zero distance between {a} and {b}: path loss is undefined")]
    ZeroDistance { a: String, b: String },

    /// A per-relay vector does not match the configured relay count.
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch {
        what: String,
        got: usize,
        expected: usize,
    },

    /// Unrecognized key in a config file or a `--set` override.
    #[error("unknown config key: {key}")]
    UnknownKey { key: String },

    /// Config file line that is not `key = value`, a comment or blank.
    #[error("malformed config line {line}: {content:?}")]
    MalformedLine { line: usize, content: String },

    /// Anything that went wrong while touching the filesystem.
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(
        field: impl Into<String>,
        constraint: impl Into<String>,
        value: impl std::fmt::Display,
    ) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            constraint: constraint.into(),
            value: value.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
