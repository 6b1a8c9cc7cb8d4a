use thiserror::Error;

use crate::scalar::ParseError;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not regular at q = 0: {0}")]
    NotRegularAtZero(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("unknown index '{0}'")]
    UnknownIndex(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("height {height} exceeds the configured bound {bound}")]
    HeightBound { height: u32, bound: u32 },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("solution not unique: {0}")]
    NonUnique(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
