//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph ingestion, splitting, training and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed edge-list input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input is structurally unable to support the operation
    /// (complete graph with no non-edges, single-class labels, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Feature column order does not match the schema a model was trained on.
    #[error("schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    /// Training diverged (non-finite loss or parameters).
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// A required model artifact is missing on disk.
    #[error("missing model artifact at {path}: {hint}")]
    MissingModel { path: String, hint: String },

    /// Malformed serialized artifact (CSV, JSON, manifest).
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
