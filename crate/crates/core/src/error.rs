use thiserror::Error;

use crate::exponents::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("exponent must lie in (0, inf], got {0}")]
    ExponentOutOfRange(Rational),

    #[error("shear weight must be nonnegative, got beta = {0}")]
    NegativeShearWeight(Rational),

    #[error("summability exponent b must be nonnegative, got {0}")]
    NegativeDecay(Rational),

    #[error("invalid truncation schedule: {0}")]
    InvalidSchedule(String),

    #[error("index ({n}, {m1}, {m2}) is not a member of octant {octant}")]
    NotInOctant { octant: String, n: i64, m1: i64, m2: i64 },

    #[error("no certified dominant term for lambda = ({0}, {1}); requires 1 <= lambda1 <= lambda2")]
    UncertifiedOctantTable(Rational, Rational),

    #[error("divergent tail: exponent rho = {0} must be < -1")]
    DivergentTail(Rational),

    #[error("tail start must be a positive integer, got {0}")]
    InvalidTailStart(u64),

    #[error("unsupported setting: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
