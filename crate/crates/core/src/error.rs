//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a precondition (wrong parity, mismatched counts, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An exhaustive operation was asked to run beyond its size bound.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    /// A numeric operation was evaluated outside its domain.
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    /// A series or limit does not exist for the given parameters.
    #[error("divergent: {0}")]
    Divergent(String),
}

impl Error {
    pub fn invalid_parameter(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
    pub fn size_limit(msg: impl Into<String>) -> Self {
        Error::SizeLimit(msg.into())
    }
    pub fn out_of_domain(msg: impl Into<String>) -> Self {
        Error::OutOfDomain(msg.into())
    }
    pub fn divergent(msg: impl Into<String>) -> Self {
        Error::Divergent(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
