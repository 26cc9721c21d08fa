use thiserror::Error;

/// Errors produced by the enumeration and analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (bad rank,
    /// malformed permutation, pattern too short, containing permutation
    /// passed where an avoider is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured resource cap was hit. Nothing is silently truncated.
    #[error("limit exceeded: {what} (limit {limit})")]
    LimitExceeded { what: String, limit: u64 },

    /// An internal consistency check failed. Seeing this is a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn limit(what: impl Into<String>, limit: u64) -> Self {
        Error::LimitExceeded {
            what: what.into(),
            limit,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
