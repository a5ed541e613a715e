//! Closed-form characterisation of `psi^(a,b) in l^theta(Z^3)`.
//!
//! Every condition is evaluated exactly and recorded with its two sides so
//! callers can print or re-check the trace.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{Rational, ThetaValue};
use crate::groups::GroupSpec;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn holds(self, lhs: Rational, rhs: Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One evaluated inequality `lhs relation rhs`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub satisfied: bool,
}

impl Condition {
    pub fn new(name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        Condition {
            name: name.into(),
            lhs,
            relation,
            rhs,
            satisfied: relation.holds(lhs, rhs),
        }
    }

    /// Signed distance from the boundary, positive when satisfied.
    pub fn slack(&self) -> Rational {
        match self.relation {
            Relation::Lt | Relation::Le => self.rhs - self.lhs,
            Relation::Gt => self.lhs - self.rhs,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.satisfied { "ok" } else { "FAILS" };
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.name, self.lhs, self.relation, self.rhs, mark
        )
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MembershipAnswer {
    pub member: bool,
    pub conditions: Vec<Condition>,
}

impl MembershipAnswer {
    pub fn from_conditions(conditions: Vec<Condition>) -> Self {
        MembershipAnswer {
            member: conditions.iter().all(|c| c.satisfied),
            conditions,
        }
    }

    pub fn first_failed(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.satisfied)
    }
}

/// Orderings of sorted standard exponents `lambda1 <= lambda2` against 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StandardCase {
    /// `1 <= lambda1 <= lambda2`
    AboveOne,
    /// `lambda1 <= lambda2 <= 1`
    BelowOne,
    /// `lambda1 <= 1 <= lambda2`
    Straddle,
}

impl StandardCase {
    pub fn applies(self, lambda1: Rational, lambda2: Rational) -> bool {
        let one = Rational::ONE;
        match self {
            StandardCase::AboveOne => one <= lambda1 && lambda1 <= lambda2,
            StandardCase::BelowOne => lambda1 <= lambda2 && lambda2 <= one,
            StandardCase::Straddle => lambda1 <= one && one <= lambda2,
        }
    }
}

/// Sort a pair ascending.
pub fn sorted(lambda1: Rational, lambda2: Rational) -> (Rational, Rational) {
    if lambda1 <= lambda2 {
        (lambda1, lambda2)
    } else {
        (lambda2, lambda1)
    }
}

/// Cases whose hypotheses hold for the sorted pair, in priority order
/// (below one, straddling, above one). Several apply when an exponent is 1.
pub fn applicable_cases(lambda1: Rational, lambda2: Rational) -> Vec<StandardCase> {
    let (l1, l2) = sorted(lambda1, lambda2);
    [StandardCase::BelowOne, StandardCase::Straddle, StandardCase::AboveOne]
        .into_iter()
        .filter(|c| c.applies(l1, l2))
        .collect()
}

/// The case used when several apply.
pub fn canonical_case(lambda1: Rational, lambda2: Rational) -> StandardCase {
    applicable_cases(lambda1, lambda2)[0]
}

fn check_decay(b: Rational) -> Result<()> {
    if b.is_negative() {
        Err(Error::NegativeDecay(b))
    } else {
        Ok(())
    }
}

fn decay_condition(b: Rational, inv_theta: Rational) -> Condition {
    // b theta > 2, written as b > 2/theta so theta never leaves the
    // reciprocal domain.
    Condition::new("b*theta > 2", b, Relation::Gt, Rational::from_int(2) * inv_theta)
}

/// Evaluate one case table for sorted exponents, without checking that the
/// case hypotheses hold. Exposed so the overlap at `lambda = 1` can be
/// compared directly.
pub fn standard_case_conditions(
    case: StandardCase,
    lambda1: Rational,
    lambda2: Rational,
    a: Rational,
    b: Rational,
    theta: ThetaValue,
) -> MembershipAnswer {
    let two = Rational::from_int(2);
    let (lo_coeff, hi_coeff) = match case {
        StandardCase::AboveOne => (Rational::ONE, lambda2),
        StandardCase::BelowOne => (lambda1, Rational::ONE),
        StandardCase::Straddle => (lambda1, lambda2),
    };
    if theta.is_infinite() {
        return MembershipAnswer::from_conditions(vec![
            Condition::new("lower bound", b * lo_coeff, Relation::Le, a),
            Condition::new("upper bound", a, Relation::Le, b * hi_coeff),
        ]);
    }
    let w = theta.recip();
    let (lo_shift, hi_shift) = match case {
        StandardCase::AboveOne => (lambda1 + lambda2 - two, lambda1 - lambda2),
        StandardCase::BelowOne => (lambda2 - lambda1, lambda1 + lambda2 - two),
        StandardCase::Straddle => (lambda2 - lambda1, lambda1 - lambda2),
    };
    MembershipAnswer::from_conditions(vec![
        decay_condition(b, w),
        Condition::new("lower bound", lo_shift * w + b * lo_coeff, Relation::Lt, a),
        Condition::new("upper bound", a, Relation::Lt, hi_shift * w + b * hi_coeff),
    ])
}

pub fn psi_in_ltheta_standard(
    lambda1: Rational,
    lambda2: Rational,
    a: Rational,
    b: Rational,
    theta: ThetaValue,
) -> Result<MembershipAnswer> {
    check_decay(b)?;
    let (l1, l2) = sorted(lambda1, lambda2);
    Ok(standard_case_conditions(canonical_case(l1, l2), l1, l2, a, b, theta))
}

pub fn psi_in_ltheta_toeplitz(
    delta: Rational,
    a: Rational,
    b: Rational,
    theta: ThetaValue,
) -> Result<MembershipAnswer> {
    check_decay(b)?;
    let shrink = Rational::ONE - Rational::from_int(2) * delta;
    let nonneg = !delta.is_negative();
    if theta.is_infinite() {
        let (lo, hi) = if nonneg { (b * shrink, b) } else { (b, b * shrink) };
        return Ok(MembershipAnswer::from_conditions(vec![
            Condition::new("lower bound", lo, Relation::Le, a),
            Condition::new("upper bound", a, Relation::Le, hi),
        ]));
    }
    let w = theta.recip();
    let shift = -Rational::from_int(3) * delta * w;
    let (lo, hi) = if nonneg {
        (b * shrink, shift + b)
    } else {
        (shift + b, b * shrink)
    };
    Ok(MembershipAnswer::from_conditions(vec![
        decay_condition(b, w),
        Condition::new("lower bound", lo, Relation::Lt, a),
        Condition::new("upper bound", a, Relation::Lt, hi),
    ]))
}

pub fn psi_in_ltheta(group: &GroupSpec, a: Rational, b: Rational, theta: ThetaValue) -> Result<MembershipAnswer> {
    match *group {
        GroupSpec::Standard { lambda1, lambda2 } => psi_in_ltheta_standard(lambda1, lambda2, a, b, theta),
        GroupSpec::Toeplitz { delta } => psi_in_ltheta_toeplitz(delta, a, b, theta),
    }
}
