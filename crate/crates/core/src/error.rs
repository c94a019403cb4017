use thiserror::Error;

use crate::convert::EpsViolation;

/// Errors shared by every layer of the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tiles live over universes of different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("state index {state} is outside a universe of {size} states")]
    StateOutOfRange { state: usize, size: usize },

    #[error("priority {priority} is not allowed here (expected {expected})")]
    InvalidPriority { priority: i32, expected: String },

    #[error("state universe must not be empty")]
    EmptyUniverse,

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("letter `eps` is reserved for ε-transitions")]
    ReservedLetter,

    #[error("ε may not appear in a word read under ε-closure semantics")]
    EpsInWord,

    #[error("the period of an ultimately-periodic word must not be empty")]
    EmptyPeriod,

    #[error("automaton is flagged deterministic but {0}")]
    NotDeterministic(String),

    #[error("automaton is not ε-complete: {0}")]
    NotEpsComplete(EpsViolation),

    #[error("{0}")]
    Usage(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
