use thiserror::Error;

use crate::syntax::Letter;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("invalid letter {0:?}: letters are lowercase a-z")]
    InvalidLetter(char),

    #[error("{what} exceeds budget: {needed} > {limit}")]
    Budget {
        what: &'static str,
        limit: usize,
        needed: usize,
    },

    #[error("letter '{0}' has no assigned element")]
    UnassignedLetter(Letter),

    #[error("relations over different base sets ({left} vs {right} points)")]
    MismatchedBase { left: usize, right: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
