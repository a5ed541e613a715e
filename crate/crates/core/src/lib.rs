//! Exact decision procedure for Sobolev embeddings of coorbit spaces over
//! three-dimensional shearlet dilation groups, with an independent
//! numerical oracle for the underlying sequence-space memberships.

pub mod analytic;
pub mod dyadic;
pub mod error;
pub mod exponents;
pub mod groups;
pub mod oracle;
pub mod sequences;
pub mod summation;
pub mod verdict;
pub mod verification;

pub use error::{Error, Result};
pub use exponents::{ExtReal, Rational, ThetaValue};
pub use groups::{FamilyIndex, GroupSpec, IndexedMatrix, Sign, WeightSpec};
pub use oracle::{classify_membership, Classification, OracleVerdict, Thresholds, TruncationSchedule};
pub use verdict::{decide, Answer, ParamTuple, Verdict};
