use alloc::string::String;

use crate::lp::LpError;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Parameters outside the range a construction or theorem is stated for.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Input too large for an exponential-time routine.
    #[error("{what} supports at most {limit} vertices, got {got}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("coordinate overflow: {0}")]
    Overflow(String),
    #[error("invalid tour: {0}")]
    InvalidTour(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}
