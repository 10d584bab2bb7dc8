use thiserror::Error;

use crate::arith::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("Kronecker symbol (a/0) is not supported")]
    ZeroModulus,

    #[error("expected a positive integer, got {0}")]
    NonPositive(i64),

    #[error("{what} requires p ≡ {residue} (mod 4), got p = {p}")]
    WrongResidue {
        what: &'static str,
        residue: u8,
        p: u64,
    },

    #[error("{0} is not a negative fundamental discriminant")]
    InvalidDiscriminant(i64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unit search exceeded bound b <= {0}")]
    SearchBound(u64),

    #[error("class number is not a positive integer: {0}")]
    NonIntegral(Rational),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn inconsistent(msg: impl Into<String>) -> Error {
    Error::Inconsistent(msg.into())
}
