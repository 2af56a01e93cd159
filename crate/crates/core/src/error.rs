//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced while parsing inputs or running analyses.
#[derive(Debug, Error)]
pub enum Error {
    /// A line of a text input could not be parsed.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A structurally invalid file (missing header, duplicate ids, ...).
    #[error("format error: {0}")]
    Format(String),

    /// A numeric value violates a domain rule (NaN, infinity, normalization).
    #[error("value error: {0}")]
    Value(String),

    /// A computation has no meaningful input (empty scope, empty intersection).
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied argument is out of range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The score kind of a table does not fit the requested operation.
    #[error("kind error: {0}")]
    Kind(String),

    /// Two tables that must describe the same prompt do not.
    #[error("pairing error: {0}")]
    Pairing(String),

    /// A wildcard fragment has no curated completions.
    #[error("missing completion list for stem `{0}`")]
    MissingCompletion(String),

    /// A completion does not start with the stem it expands.
    #[error("completion `{word}` does not start with stem `{stem}`")]
    Consistency { stem: String, word: String },

    /// None of the surface variants of a word resolve to an evaluated token.
    #[error("no surface variant of `{0}` resolves to an evaluated token")]
    MissingWord(String),

    /// No word of a construct resolves to a ranked token.
    #[error("construct `{0}` has no resolvable words")]
    MissingConstruct(String),

    /// A statistic is undefined for the given input (zero variance, all ties).
    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
