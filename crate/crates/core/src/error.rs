use std::io;

use thiserror::Error;

/// Errors produced while constructing or parsing instances.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed instance text; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Invalid argument to a constructor or generator.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The coefficient range could overflow 64-bit objective arithmetic.
    #[error("instance too large for exact i64 arithmetic: n = {n}, max |q| = {max_abs}")]
    Overflow { n: usize, max_abs: i64 },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
