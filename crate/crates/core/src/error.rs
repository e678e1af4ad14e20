use thiserror::Error;

use crate::Natural;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(f64),

    #[error("{0} is not a probable prime")]
    NotPrime(Natural),

    #[error("factorization of {0} is incomplete")]
    IncompleteFactorization(Natural),

    #[error("trial division up to {requested} exceeds the cost wall {wall}")]
    CostWall { requested: Natural, wall: u64 },

    #[error("no suitable residue after {draws} draws modulo {modulus}; the modulus is likely composite")]
    DrawCapExceeded { modulus: Natural, draws: u64 },

    #[error("no solution for alpha in [{lo}, {hi}]")]
    AlphaOutOfRange { lo: f64, hi: f64 },

    #[error("generation budget of {0} candidates exhausted")]
    BudgetExhausted(u64),

    #[error("parse error: {0}")]
    Parse(String),
}
