//! The margin grid on which the analytic membership test and the numerical
//! oracle are compared.

use serde::{Deserialize, Serialize};

use crate::analytic::psi_in_ltheta;
use crate::error::{Error, Result};
use crate::exponents::{Rational, ThetaValue};
use crate::groups::GroupSpec;
use crate::oracle::Classification;
use crate::sequences::SummabilityQuery;

pub fn margin_groups() -> Vec<GroupSpec> {
    let r = |n: i128, d: i128| Rational::new(n, d);
    let mut groups: Vec<GroupSpec> = [
        (r(1, 1), r(1, 1)),
        (r(1, 1), r(2, 1)),
        (r(2, 1), r(3, 1)),
        (r(1, 2), r(1, 2)),
        (r(1, 2), r(2, 1)),
        (r(0, 1), r(1, 1)),
        (r(-1, 1), r(2, 1)),
    ]
    .into_iter()
    .map(|(a, b)| GroupSpec::standard(a, b))
    .collect();
    groups.extend(
        [r(-1, 1), r(-1, 2), r(0, 1), r(1, 2), r(1, 1)]
            .into_iter()
            .map(GroupSpec::toeplitz),
    );
    groups
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MarginPoint {
    pub query: SummabilityQuery,
    pub member: bool,
    /// Some analytic condition holds or fails with zero slack.
    pub boundary: bool,
}

/// Queries whose every analytic condition has slack at least `margin`.
/// For each `(group, theta, b)` the decay-free exponent `a` runs over a
/// lattice of step 1/4 in `[-24, 24]`; the two points nearest each bound
/// (the nearest and one unit further out) and five quantiles of the member
/// range are kept.
pub fn margin_grid(margin: Rational) -> Result<Vec<MarginPoint>> {
    if margin.is_negative() {
        return Err(Error::Unsupported(format!("negative margin {margin}")));
    }
    let thetas = [
        ThetaValue::from_int(1),
        ThetaValue::from_int(2),
        ThetaValue::from_int(4),
        ThetaValue::INFINITE,
    ];
    let mut points = Vec::new();
    for group in margin_groups() {
        for theta in thetas {
            for b in [Rational::from_int(1), Rational::from_int(3)] {
                let mut below = Vec::new();
                let mut inside = Vec::new();
                let mut above = Vec::new();
                for k in -96..=96 {
                    let a = Rational::new(k, 4);
                    let ans = psi_in_ltheta(&group, a, b, theta)?;
                    let min_slack = ans.conditions.iter().map(|c| c.slack().abs()).min().unwrap_or(margin);
                    if min_slack < margin {
                        continue;
                    }
                    let slot = (a, ans.member, min_slack.is_zero());
                    let bound = |name: &str| ans.conditions.iter().find(|c| c.name == name).map(|c| c.satisfied);
                    match (bound("lower bound"), bound("upper bound")) {
                        (Some(false), _) => below.push(slot),
                        (_, Some(false)) => above.push(slot),
                        _ => inside.push(slot),
                    }
                }
                let mut picks = Vec::new();
                for side in [below.iter().rev().collect::<Vec<_>>(), above.iter().collect()] {
                    picks.extend(side.first().copied());
                    picks.extend(side.get(4).copied());
                }
                if !inside.is_empty() {
                    let last = inside.len() - 1;
                    let mut idx = vec![0, last / 4, last / 2, 3 * last / 4, last];
                    idx.dedup();
                    picks.extend(idx.into_iter().map(|i| &inside[i]));
                }
                for &(a, member, boundary) in picks {
                    points.push(MarginPoint {
                        query: SummabilityQuery::new(group, a, b, theta)?,
                        member,
                        boundary,
                    });
                }
            }
        }
    }
    Ok(points)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agreement {
    Agree,
    Inconclusive,
    Contradiction,
}

impl Agreement {
    pub fn of(member: bool, classification: Classification) -> Self {
        match (member, classification) {
            (_, Classification::Inconclusive) => Agreement::Inconclusive,
            (true, Classification::Convergent) | (false, Classification::Divergent) => Agreement::Agree,
            _ => Agreement::Contradiction,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Inconclusive => "inconclusive",
            Agreement::Contradiction => "contradiction",
        }
    }
}
