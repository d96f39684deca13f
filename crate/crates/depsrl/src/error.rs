//! Error types shared across the crate.

use thiserror::Error;

/// Violations of the core data invariants.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid dependency tree: {0}")]
    Tree(String),
    #[error("invalid SRL frame: {0}")]
    Frame(String),
}

/// Joint-label codec failures.
#[derive(Debug, Error)]
pub enum CodecError {
    #[error("invalid label component `{field}`: {reason}")]
    Component { field: &'static str, reason: String },
    #[error("cannot parse `{field}`: {reason}")]
    Parse { field: &'static str, reason: String },
}

/// Failures of the span/head conversion operations.
#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("empty or out-of-range span {start}..{end} for sentence of length {len}")]
    BadSpan { start: usize, end: usize, len: usize },
}

/// Corpus file format errors, with the location that triggered them.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}:{line}: {message}")]
    Syntax {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl FormatError {
    pub fn syntax(path: &str, line: usize, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

/// Model construction, training and checkpoint errors.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training requires a non-empty corpus")]
    EmptyCorpus,
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("checkpoint i/o: {0}")]
    CheckpointIo(#[from] std::io::Error),
}

/// Decoder preconditions.
#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("brute-force enumeration refused for n = {0} (limit 8)")]
    TooLong(usize),
}

/// Evaluation preconditions.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sentence length mismatch: gold {gold} vs predicted {predicted}")]
    LengthMismatch { gold: usize, predicted: usize },
}
