//! The embedding decision and the structural queries built on it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytic::{applicable_cases, canonical_case, Condition, Relation, StandardCase};
use crate::error::{Error, Result};
use crate::exponents::{theta_from, theta_with_base, ExtReal, Rational, ThetaValue};
use crate::groups::{GroupSpec, WeightSpec};
use crate::sequences::a_shift;

/// A full query `(p, q, r, alpha, beta, k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ParamTuple {
    pub p: ExtReal,
    pub q: ExtReal,
    pub r: ExtReal,
    pub weight: WeightSpec,
    pub k: u32,
}

impl ParamTuple {
    pub fn new(p: ExtReal, q: ExtReal, r: ExtReal, weight: WeightSpec, k: u32) -> Self {
        ParamTuple { p, q, r, weight, k }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Embeds,
    DoesNotEmbed,
    IndeterminateGap,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Embeds => "embeds",
            Answer::DoesNotEmbed => "does-not-embed",
            Answer::IndeterminateGap => "indeterminate-gap",
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the characterisation is exact (`q <= 2` or `q = inf`) or only
/// brackets the answer (`2 < q < inf`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Characterized,
    Gap,
}

/// Which chain of inequalities was evaluated.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "std-a")]
    StandardAboveOne,
    #[serde(rename = "std-b")]
    StandardBelowOne,
    #[serde(rename = "std-c")]
    StandardStraddle,
    #[serde(rename = "toe-pos")]
    ToeplitzNonnegative,
    #[serde(rename = "toe-neg")]
    ToeplitzNegative,
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::StandardAboveOne => "std-a",
            CaseId::StandardBelowOne => "std-b",
            CaseId::StandardStraddle => "std-c",
            CaseId::ToeplitzNonnegative => "toe-pos",
            CaseId::ToeplitzNegative => "toe-neg",
        }
    }

    fn from_standard(case: StandardCase) -> Self {
        match case {
            StandardCase::AboveOne => CaseId::StandardAboveOne,
            StandardCase::BelowOne => CaseId::StandardBelowOne,
            StandardCase::Straddle => CaseId::StandardStraddle,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub regime: Regime,
    pub theta: ThetaValue,
    /// Exponent of the necessary-condition form, present in the gap regime.
    pub theta_necessary: Option<ThetaValue>,
    pub case: CaseId,
    /// `A = alpha + D gamma`, the quantity the chains bound.
    pub a_shift: Rational,
    pub trace: Vec<Condition>,
    pub failed_first: Option<String>,
    pub notes: Vec<String>,
}

pub const GAP_NOTE: &str = "necessary form obtained by substituting q for min(q, q') in every inequality, \
keeping each relation's strictness unchanged";

fn max(a: Rational, b: Rational) -> Rational {
    std::cmp::max(a, b)
}

/// The chain for one case, with `w = 1/theta` (`theta = inf` gives the
/// closed form).
fn chain(
    case: CaseId,
    group: &GroupSpec,
    beta: Rational,
    k: Rational,
    a: Rational,
    theta: ThetaValue,
) -> Vec<Condition> {
    let two = Rational::from_int(2);
    let bk = beta - k;
    let mut out = Vec::with_capacity(3);
    // Lower and upper bounds at theta = inf, then the theta-dependent shifts.
    let (lo, hi, lo_shift, hi_shift) = match case {
        CaseId::ToeplitzNonnegative | CaseId::ToeplitzNegative => {
            let GroupSpec::Toeplitz { delta } = *group else {
                unreachable!("Toeplitz case for a standard group")
            };
            let shrink = Rational::ONE - two * delta;
            let d3 = -Rational::from_int(3) * delta;
            if case == CaseId::ToeplitzNonnegative {
                (max(beta * shrink, bk * shrink), bk, Rational::ZERO, d3)
            } else {
                (beta, bk * shrink, d3, Rational::ZERO)
            }
        }
        _ => {
            let (l1, l2) = group.canonical_pair();
            let mx = max(beta * l1, bk * l1);
            match case {
                CaseId::StandardAboveOne => (beta, bk * l2, l1 + l2 - two, l1 - l2),
                CaseId::StandardBelowOne => (mx, bk, l2 - l1, l1 + l2 - two),
                _ => (mx, bk * l2, l2 - l1, l1 - l2),
            }
        }
    };
    if theta.is_infinite() {
        out.push(Condition::new("lower bound", lo, Relation::Le, a));
        out.push(Condition::new("upper bound", a, Relation::Le, hi));
    } else {
        let w = theta.recip();
        out.push(Condition::new("beta > k + 2/theta", beta, Relation::Gt, k + two * w));
        out.push(Condition::new("lower bound", lo_shift * w + lo, Relation::Lt, a));
        out.push(Condition::new("upper bound", a, Relation::Lt, hi_shift * w + hi));
    }
    out
}

fn order_condition(p: ExtReal, q: ExtReal) -> Condition {
    Condition::new("p <= q (as 1/q <= 1/p)", q.recip(), Relation::Le, p.recip())
}

fn conditions_for(
    case: CaseId,
    group: &GroupSpec,
    params: &ParamTuple,
    a: Rational,
    theta: ThetaValue,
) -> Vec<Condition> {
    let mut out = vec![order_condition(params.p, params.q)];
    let k = Rational::from_int(params.k as i128);
    out.extend(chain(case, group, params.weight.beta, k, a, theta));
    out
}

fn all_hold(conds: &[Condition]) -> bool {
    conds.iter().all(|c| c.satisfied)
}

fn case_of(group: &GroupSpec) -> (CaseId, Vec<CaseId>) {
    match *group {
        GroupSpec::Toeplitz { delta } => {
            let c = if delta.is_negative() {
                CaseId::ToeplitzNegative
            } else {
                CaseId::ToeplitzNonnegative
            };
            (c, vec![])
        }
        GroupSpec::Standard { lambda1, lambda2 } => {
            let all: Vec<CaseId> = applicable_cases(lambda1, lambda2)
                .into_iter()
                .map(CaseId::from_standard)
                .collect();
            (
                CaseId::from_standard(canonical_case(lambda1, lambda2)),
                all[1..].to_vec(),
            )
        }
    }
}

fn evaluate(group: &GroupSpec, params: &ParamTuple, a: Rational, theta: ThetaValue) -> (CaseId, Vec<Condition>) {
    let (case, others) = case_of(group);
    let conds = conditions_for(case, group, params, a, theta);
    let holds = all_hold(&conds);
    for other in others {
        // Overlapping closed hypotheses at lambda = 1: the adjacent chains
        // describe the same set.
        assert_eq!(
            all_hold(&conditions_for(other, group, params, a, theta)),
            holds,
            "case chains {case} and {other} disagree for {group} at {params:?}"
        );
    }
    (case, conds)
}

fn prefixed(prefix: &str, conds: Vec<Condition>) -> Vec<Condition> {
    conds
        .into_iter()
        .map(|c| Condition {
            name: format!("{prefix}: {}", c.name),
            ..c
        })
        .collect()
}

/// Decide `Co(L^{p,r}_{v^(alpha,beta)}) -> W^{k,q}` for `group`.
pub fn decide(group: &GroupSpec, params: &ParamTuple) -> Result<Verdict> {
    if params.weight.beta.is_negative() {
        return Err(Error::NegativeShearWeight(params.weight.beta));
    }
    let a = a_shift(group, params);
    let theta = theta_from(params.q, params.r);
    let two = ExtReal::int(2);
    let gap = params.q > two && !params.q.is_infinite();

    let verdict = if !gap {
        let (case, trace) = evaluate(group, params, a, theta);
        let answer = if all_hold(&trace) {
            Answer::Embeds
        } else {
            Answer::DoesNotEmbed
        };
        Verdict {
            answer,
            regime: Regime::Characterized,
            theta,
            theta_necessary: None,
            case,
            a_shift: a,
            failed_first: trace.iter().find(|c| !c.satisfied).map(|c| c.name.clone()),
            trace,
            notes: vec![],
        }
    } else {
        let theta_nec = theta_with_base(params.q, params.r);
        let (case, sufficient) = evaluate(group, params, a, theta);
        let (_, necessary) = evaluate(group, params, a, theta_nec);
        let suff_ok = all_hold(&sufficient);
        let nec_ok = all_hold(&necessary);
        let answer = if suff_ok {
            Answer::Embeds
        } else if !nec_ok {
            Answer::DoesNotEmbed
        } else {
            Answer::IndeterminateGap
        };
        let sufficient = prefixed("sufficient", sufficient);
        let necessary = prefixed("necessary", necessary);
        let failed_first = match answer {
            Answer::Embeds => None,
            Answer::DoesNotEmbed => necessary.iter().find(|c| !c.satisfied).map(|c| c.name.clone()),
            Answer::IndeterminateGap => sufficient.iter().find(|c| !c.satisfied).map(|c| c.name.clone()),
        };
        let mut trace = sufficient;
        trace.extend(necessary);
        Verdict {
            answer,
            regime: Regime::Gap,
            theta,
            theta_necessary: Some(theta_nec),
            case,
            a_shift: a,
            trace,
            failed_first,
            notes: vec![GAP_NOTE.to_string()],
        }
    };
    if verdict.answer == Answer::Embeds {
        assert!(params.p <= params.q, "embedding reported with p > q");
        assert!(beta_ge_k_necessary(params), "embedding reported with beta < k");
    }
    Ok(verdict)
}

pub fn beta_ge_k_necessary(params: &ParamTuple) -> bool {
    params.weight.beta >= Rational::from_int(params.k as i128)
}

/// Whether two groups share the same unordered diagonal exponent pair.
pub fn same_embedding_behavior(g1: &GroupSpec, g2: &GroupSpec) -> bool {
    g1.canonical_pair() == g2.canonical_pair()
}

fn check_lp_setting(p: ExtReal, q: ExtReal) -> Result<()> {
    if q > ExtReal::int(2) {
        return Err(Error::Unsupported(format!("q = {q} outside (0, 2]")));
    }
    if p > q {
        return Err(Error::Unsupported(format!("p = {p} exceeds q = {q}")));
    }
    Ok(())
}

/// A weight exponent `alpha` for which `Co(L^p_{v^(alpha,beta)})` embeds
/// into `W^{k,q}`, if one exists. Requires `p <= q <= 2` and uses `r = p`.
pub fn exists_alpha(group: &GroupSpec, p: ExtReal, q: ExtReal, beta: Rational, k: u32) -> Result<Option<Rational>> {
    check_lp_setting(p, q)?;
    if beta.is_negative() {
        return Err(Error::NegativeShearWeight(beta));
    }
    let (l1, l2) = group.canonical_pair();
    let bk = beta - Rational::from_int(k as i128);
    let mx = max(beta * l1, bk * l1);
    let (holds, target) = match canonical_case(l1, l2) {
        StandardCase::AboveOne => (beta <= bk * l2, bk * l2),
        StandardCase::BelowOne => (mx <= bk, bk),
        StandardCase::Straddle => (mx <= bk * l2, bk * l2),
    };
    if !holds {
        return Ok(None);
    }
    let d = Rational::ONE + l1 + l2;
    Ok(Some(target - d * (Rational::HALF - q.recip())))
}

/// Largest `k` with an embedding `Co(L^p_{v^(alpha,beta)}) -> W^{k,p}`,
/// found by descending from the closed-form upper bound and confirming
/// each candidate with [`decide`]. Requires `p <= 2`.
pub fn max_smoothness_k(group: &GroupSpec, p: ExtReal, alpha: Rational, beta: Rational) -> Result<Option<u32>> {
    check_lp_setting(p, p)?;
    let weight = WeightSpec::new(alpha, beta)?;
    let tuple = |k: u32| ParamTuple::new(p, p, p, weight, k);
    let embeds = |k: u32| -> Result<bool> { Ok(decide(group, &tuple(k))?.answer == Answer::Embeds) };
    // Embedding is monotone in k, so failure at 0 settles the question.
    if !embeds(0)? {
        return Ok(None);
    }
    let (l1, l2) = group.canonical_pair();
    let a = alpha + (Rational::ONE + l1 + l2) * (Rational::HALF - p.recip());
    let from_chain = match canonical_case(l1, l2) {
        StandardCase::BelowOne => beta - a,
        _ => beta - a / l2,
    };
    let bound = std::cmp::min(beta.floor(), from_chain.floor());
    let mut k = u32::try_from(bound.max(0)).unwrap_or(u32::MAX);
    while k > 0 && !embeds(k)? {
        k -= 1;
    }
    Ok(Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn e(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    fn std(l1: &str, l2: &str) -> GroupSpec {
        GroupSpec::standard(q(l1), q(l2))
    }

    fn tuple(p: &str, qq: &str, r: &str, alpha: &str, beta: &str, k: u32) -> ParamTuple {
        ParamTuple::new(e(p), e(qq), e(r), WeightSpec::new(q(alpha), q(beta)).unwrap(), k)
    }

    #[test]
    fn isotropic_smoothness_fails() {
        let v = decide(&std("1", "1"), &tuple("2", "2", "2", "0", "1", 1)).unwrap();
        assert_eq!(v.answer, Answer::DoesNotEmbed);
        assert_eq!(v.theta, ThetaValue::INFINITE);
        // 1 <= 0 is the first inequality to fail.
        let failed = v.trace.iter().find(|c| !c.satisfied).unwrap();
        assert_eq!((failed.lhs, failed.rhs), (q("1"), q("0")));
    }

    #[test]
    fn order_gate() {
        for g in [std("1", "2"), std("-1", "1/2"), GroupSpec::toeplitz(q("1/3"))] {
            let v = decide(&g, &tuple("2", "1", "2", "0", "0", 0)).unwrap();
            assert_eq!(v.answer, Answer::DoesNotEmbed);
            assert_eq!(v.failed_first.as_deref(), Some("p <= q (as 1/q <= 1/p)"));
        }
    }

    #[test]
    fn anisotropic_embeds() {
        let v = decide(&std("1", "2"), &tuple("2", "2", "2", "2", "2", 1)).unwrap();
        assert_eq!(v.answer, Answer::Embeds);
        assert_eq!(v.case, CaseId::StandardStraddle);
        assert_eq!(v.a_shift, q("2"));
        assert!(v.failed_first.is_none());
    }

    #[test]
    fn gap_regime() {
        // q = 4: q' = 4/3 drives the sufficient form, q itself the necessary one.
        let v = decide(&std("1", "2"), &tuple("1", "4", "inf", "0", "3", 0)).unwrap();
        assert_eq!(v.regime, Regime::Gap);
        assert_eq!(v.theta, ThetaValue(e("4/3")));
        assert_eq!(v.theta_necessary, Some(ThetaValue(e("4"))));
        assert_eq!(v.notes, vec![GAP_NOTE.to_string()]);
        // gamma = 1/2 + 1 - 1/4 = 5/4, D = 4, A = alpha + 5.
        // Sufficient (w = 3/4): 3 > 3/2; 3/4 + 3 < A < -3/4 + 6.
        // Necessary (w = 1/4):  3 > 1/2; 1/4 + 3 < A < -1/4 + 6.
        let at = |alpha: &str| {
            decide(&std("1", "2"), &tuple("1", "4", "inf", alpha, "3", 0))
                .unwrap()
                .answer
        };
        assert_eq!(at("-1/2"), Answer::Embeds);
        assert_eq!(at("-3/2"), Answer::IndeterminateGap);
        assert_eq!(at("-2"), Answer::DoesNotEmbed);
        assert_eq!(at("3/4"), Answer::DoesNotEmbed);
    }

    #[test]
    fn negative_beta_rejected() {
        let bad = ParamTuple {
            weight: WeightSpec {
                alpha: q("0"),
                beta: q("-1"),
            },
            ..tuple("1", "1", "1", "0", "0", 0)
        };
        assert!(decide(&std("1", "2"), &bad).is_err());
    }

    #[test]
    fn beta_k_examples() {
        assert!(!beta_ge_k_necessary(&tuple("1", "1", "1", "0", "0", 1)));
        assert!(beta_ge_k_necessary(&tuple("1", "1", "1", "0", "2", 2)));
        assert!(beta_ge_k_necessary(&tuple("1", "1", "1", "0", "3", 1)));
    }

    #[test]
    fn same_behavior_examples() {
        assert!(same_embedding_behavior(&std("1", "2"), &std("2", "1")));
        assert!(same_embedding_behavior(
            &GroupSpec::toeplitz(q("1/2")),
            &std("1/2", "0")
        ));
        assert!(!same_embedding_behavior(
            &GroupSpec::toeplitz(q("0")),
            &GroupSpec::toeplitz(q("1"))
        ));
    }

    #[test]
    fn exists_alpha_examples() {
        for beta in ["0", "1", "5/2", "7"] {
            assert_eq!(exists_alpha(&std("1", "1"), e("1"), e("2"), q(beta), 1).unwrap(), None);
        }
        for g in [std("1", "1"), std("-2", "1/3"), GroupSpec::toeplitz(q("-1"))] {
            assert!(exists_alpha(&g, e("1/2"), e("1"), q("0"), 0).unwrap().is_some());
        }
        let alpha = exists_alpha(&std("-1", "2"), e("2"), e("2"), q("1"), 1)
            .unwrap()
            .unwrap();
        let v = decide(&std("-1", "2"), &tuple("2", "2", "2", &alpha.to_string(), "1", 1)).unwrap();
        assert_eq!(v.answer, Answer::Embeds);
        assert!(exists_alpha(&std("1", "2"), e("2"), e("1"), q("1"), 0).is_err());
        assert!(exists_alpha(&std("1", "2"), e("2"), e("3"), q("1"), 0).is_err());
    }

    #[test]
    fn max_smoothness_examples() {
        assert_eq!(max_smoothness_k(&std("1", "1"), e("2"), q("0"), q("5")).unwrap(), None);
        assert_eq!(
            max_smoothness_k(&std("1", "2"), e("2"), q("2"), q("2")).unwrap(),
            Some(1)
        );
        let g = std("1/2", "3/2");
        let alpha = exists_alpha(&g, e("1"), e("1"), q("0"), 0).unwrap().unwrap();
        assert_eq!(max_smoothness_k(&g, e("1"), alpha, q("0")).unwrap(), Some(0));
    }
}
