use crate::dist::Violation;

/// Error type shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Range(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("capacity exceeded: {what} requires {needed}, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid distribution: {0}")]
    Invalid(#[from] Violation),

    #[error("polyhedron is unbounded")]
    Unbounded,

    /// A cross-check that is guaranteed by the mathematics failed;
    /// this always indicates a bug, never bad input.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
