use thiserror::Error;

use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("probabilities sum to {0}")]
    ProbabilitySum(Rational),
    #[error("probability {0} is not positive")]
    NonPositiveProbability(Rational),
    #[error("distribution has no atoms")]
    Empty,
    #[error("level {0} outside [0,1]")]
    LevelOutOfRange(Rational),
    #[error("invalid segments: {0}")]
    InvalidSegments(String),
    #[error("not monotone: {0}")]
    NotMonotone(String),
    #[error("not representable: {0}")]
    Unrepresentable(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
    #[error("membership undecidable: {0}")]
    Undecidable(String),
    #[error("membership routes disagree: {0}")]
    RouteDisagreement(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numeraire coordinate {0} is not strictly positive")]
    NonPositiveNumeraire(Rational),
    #[error("sequence does not converge: {0}")]
    NonConvergent(String),
    #[error("{0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
