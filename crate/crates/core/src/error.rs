use thiserror::Error;

/// Errors surfaced by the library; internal inconsistencies are reported, never hidden.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("operation budget exceeded: projected {projected} > budget {budget}")]
    Budget { projected: u128, budget: u128 },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
