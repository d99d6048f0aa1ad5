use thiserror::Error;

/// Errors raised by the library. Every operation is total on its stated
/// preconditions; anything outside them surfaces here rather than panicking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("pole: {0}")]
    Pole(String),

    #[error("search too large: {cells} candidate polynomials exceed the budget of {budget}")]
    TooLarge { cells: u128, budget: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid certificate: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
