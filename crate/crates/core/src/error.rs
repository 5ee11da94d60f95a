use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: out-of-range values, arity mismatches, invalid files.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An enumeration or search exceeded its configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A solver refused an instance because its precondition does not hold.
    #[error("solver precondition failed: {0}")]
    Dispatch(String),

    /// Two routes that must agree disagreed; this signals a bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
