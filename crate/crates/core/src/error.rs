use thiserror::Error;

/// Errors raised by the exact-arithmetic, combinatorics and expansion layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("pole at N = {0}")]
    Pole(String),
    #[error("leading behaviour of the zero function is undefined")]
    ZeroFunction,
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("budget exceeded: {what} needs about {estimate} evaluations (limit {limit})")]
    Budget {
        what: String,
        estimate: u128,
        limit: u128,
    },
    #[error("outside domain: {0}")]
    Domain(String),
}

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn budget(what: impl Into<String>, estimate: u128, limit: u128) -> Self {
        Error::Budget {
            what: what.into(),
            estimate,
            limit,
        }
    }

    /// True for refusals caused by a size budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
