//! The summability sequences `psi^(a,b)` and `zeta`, the octant cover of
//! `Z^3` and the dominant-term table for the norm on each octant.

use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::dyadic::{ExactValue, Monomial, PowerTerm};
use crate::error::{Error, Result};
use crate::exponents::{gamma, Rational, ThetaValue};
use crate::groups::{matrix_A, norm_sum, FamilyIndex, GroupSpec};
use crate::verdict::ParamTuple;

/// A membership question `psi^(a,b) in l^theta(Z^3)` for a given group.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SummabilityQuery {
    pub group: GroupSpec,
    pub a: Rational,
    pub b: Rational,
    pub theta: ThetaValue,
}

impl SummabilityQuery {
    pub fn new(group: GroupSpec, a: Rational, b: Rational, theta: ThetaValue) -> Result<Self> {
        if b.is_negative() {
            return Err(Error::NegativeDecay(b));
        }
        Ok(SummabilityQuery { group, a, b, theta })
    }
}

fn psi_unchecked(group: &GroupSpec, a: Rational, b: Rational, n: i64, m1: i64, m2: i64) -> ExactValue {
    let n_r = Rational::from(n);
    ExactValue::single(PowerTerm {
        scale_exp: n_r * a,
        base: norm_sum(&matrix_A(group, FamilyIndex::plus(n, m1, m2))),
        power: -b,
    })
}

/// `psi^(a,b)_{n,m1,m2} = 2^{na} ||A_{n,m1,m2,1}||^{-b}`.
pub fn psi(group: &GroupSpec, a: Rational, b: Rational, n: i64, m1: i64, m2: i64) -> Result<ExactValue> {
    if b.is_negative() {
        return Err(Error::NegativeDecay(b));
    }
    Ok(psi_unchecked(group, a, b, n, m1, m2))
}

/// The shifted exponent `a = alpha + D gamma(p, q, r)` with `|det A_n| = 2^{nD}`.
pub fn a_shift(group: &GroupSpec, params: &ParamTuple) -> Rational {
    params.weight.alpha + group.det_exponent() * gamma(params.p, params.q, params.r)
}

/// `zeta = psi^(a,beta) + psi^(a,beta-k)`; the sign index does not enter.
pub fn zeta(group: &GroupSpec, params: &ParamTuple, idx: FamilyIndex) -> ExactValue {
    let a = a_shift(group, params);
    let beta = params.weight.beta;
    let k = Rational::from_int(params.k as i128);
    psi_unchecked(group, a, beta, idx.n, idx.m1, idx.m2).plus(psi_unchecked(group, a, beta - k, idx.n, idx.m1, idx.m2))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Half {
    Plus,
    Minus,
}

/// One of the eight sets `M_i^+-`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OctantId {
    pub half: Half,
    pub index: u8,
}

impl OctantId {
    pub const fn new(half: Half, index: u8) -> Self {
        OctantId { half, index }
    }

    pub fn all() -> impl Iterator<Item = OctantId> {
        [Half::Plus, Half::Minus]
            .into_iter()
            .flat_map(|h| (1..=4).map(move |i| OctantId::new(h, i)))
    }
}

impl fmt::Display for OctantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.half {
            Half::Plus => '+',
            Half::Minus => '-',
        };
        write!(f, "M{}{}", self.index, s)
    }
}

/// The nonnegative monomials of the standard-group norm that the octant
/// inequalities compare.
struct NormTerms {
    base: Monomial,
    t2: Monomial,
    x1: Monomial,
    x2: Monomial,
}

impl NormTerms {
    fn new(lambda1: Rational, lambda2: Rational, n: i64, m1: i64, m2: i64) -> Self {
        let n_r = Rational::from(n);
        let t1 = Monomial::power_of_two(n_r * lambda1);
        let t2 = Monomial::power_of_two(n_r * lambda2);
        NormTerms {
            base: Monomial::power_of_two(n_r),
            t2,
            x1: t1.scale(m1.unsigned_abs() as i128),
            x2: t2.scale(m2.unsigned_abs() as i128),
        }
    }

    fn le(a: &Monomial, b: &Monomial) -> bool {
        a.cmp_nonneg(b).is_le()
    }

    fn contains(&self, octant: OctantId, n: i64) -> bool {
        let (half_ok, scale) = match octant.half {
            Half::Plus => (n >= 0, &self.t2),
            Half::Minus => (n < 0, &self.base),
        };
        if !half_ok {
            return false;
        }
        match octant.index {
            1 => Self::le(&self.x1, &self.x2) && Self::le(scale, &self.x2),
            2 => Self::le(&self.x1, &self.x2) && Self::le(&self.x2, scale),
            3 => Self::le(&self.x2, &self.x1) && Self::le(scale, &self.x1),
            4 => Self::le(&self.x2, &self.x1) && Self::le(&self.x1, scale),
            _ => false,
        }
    }
}

/// Octants containing `(n, m1, m2)`, using the defining non-strict
/// inequalities (boundary points belong to several octants).
pub fn octant_members(lambda1: Rational, lambda2: Rational, n: i64, m1: i64, m2: i64) -> SmallVec<[OctantId; 4]> {
    let terms = NormTerms::new(lambda1, lambda2, n, m1, m2);
    OctantId::all().filter(|o| terms.contains(*o, n)).collect()
}

/// The norm term dominating on `octant`, within a factor 5.
///
/// Only certified for `1 <= lambda1 <= lambda2`; other orderings return
/// [`Error::UncertifiedOctantTable`].
pub fn dominant_norm_term(
    octant: OctantId,
    lambda1: Rational,
    lambda2: Rational,
    n: i64,
    m1: i64,
    m2: i64,
) -> Result<Monomial> {
    if !(Rational::ONE <= lambda1 && lambda1 <= lambda2) {
        return Err(Error::UncertifiedOctantTable(lambda1, lambda2));
    }
    let terms = NormTerms::new(lambda1, lambda2, n, m1, m2);
    if !terms.contains(octant, n) {
        return Err(Error::NotInOctant {
            octant: octant.to_string(),
            n,
            m1,
            m2,
        });
    }
    Ok(match (octant.half, octant.index) {
        (_, 1) => terms.x2,
        (_, 3) => terms.x1,
        (Half::Plus, _) => terms.t2,
        (Half::Minus, _) => terms.base,
    })
}

/// The estimate `m0^{1 + rho}` for `sum_{m >= m0} m^rho`.
pub fn tail_sum_estimate(m0: u64, rho: Rational) -> Result<f64> {
    if m0 == 0 {
        return Err(Error::InvalidTailStart(m0));
    }
    let m0 = m0.to_f64().expect("u64 converts to f64");
    Ok(log2_tail_estimate(m0.log2(), rho)?.exp2())
}

/// `log2` of [`tail_sum_estimate`], for starting points beyond `u64`.
pub fn log2_tail_estimate(log2_m0: f64, rho: Rational) -> Result<f64> {
    if rho >= -Rational::ONE {
        return Err(Error::DivergentTail(rho));
    }
    Ok((Rational::ONE + rho).to_f64() * log2_m0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicSum;
    use crate::exponents::ExtReal;
    use crate::groups::{Sign, WeightSpec};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn std(l1: &str, l2: &str) -> GroupSpec {
        GroupSpec::standard(q(l1), q(l2))
    }

    fn ids(v: &[(Half, u8)]) -> SmallVec<[OctantId; 4]> {
        v.iter().map(|(h, i)| OctantId::new(*h, *i)).collect()
    }

    #[test]
    fn psi_examples() {
        let g = std("1", "1");
        assert_eq!(
            psi(&g, q("5/3"), Rational::ZERO, 0, 4, -2).unwrap().to_rational(),
            Some(Rational::ONE)
        );
        assert_eq!(
            psi(&g, Rational::ZERO, Rational::ONE, 0, 0, 0).unwrap().to_rational(),
            Some(q("1/3"))
        );
        // At n = 0 the value is (3 + |m1| + |m2|)^{-b} for every standard group.
        let g = std("-1/2", "7/3");
        let v = psi(&g, q("9"), q("2"), 0, -3, 5).unwrap();
        assert_eq!(v.to_rational(), Some(q("1/121")));
        assert!(psi(&g, Rational::ZERO, q("-1"), 0, 0, 0).is_err());
    }

    #[test]
    fn psi_non_integer_decay_in_log_domain() {
        let g = std("1", "2");
        let v = psi(&g, q("1/2"), q("3/2"), 1, 1, 2).unwrap();
        assert!((v.log2() - (0.5 - 1.5 * 18f64.log2())).abs() < 1e-12);
    }

    fn tuple(p: &str, qq: &str, r: &str, alpha: &str, beta: &str, k: u32) -> ParamTuple {
        ParamTuple::new(
            p.parse().unwrap(),
            qq.parse().unwrap(),
            r.parse().unwrap(),
            WeightSpec::new(q(alpha), q(beta)).unwrap(),
            k,
        )
    }

    #[test]
    fn zeta_examples() {
        let g = std("1", "1");
        let t = tuple("2", "2", "2", "0", "1", 1);
        assert_eq!(zeta(&g, &t, FamilyIndex::plus(0, 0, 0)).to_rational(), Some(q("4/3")));
        let t0 = tuple("1", "2", "3", "1/2", "2", 0);
        let g = std("1/2", "3");
        let idx = FamilyIndex::plus(2, 1, -1);
        let z = zeta(&g, &t0, idx).to_dyadic().unwrap();
        let p = psi(&g, a_shift(&g, &t0), q("2"), 2, 1, -1)
            .unwrap()
            .to_dyadic()
            .unwrap();
        assert_eq!(z, p.add(&p));
        assert_eq!(
            zeta(
                &g,
                &t0,
                FamilyIndex {
                    eps: Sign::Minus,
                    ..idx
                }
            )
            .to_dyadic()
            .unwrap(),
            z
        );
    }

    #[test]
    fn a_shift_uses_determinant_exponent() {
        let t = tuple("1", "2", "inf", "1/2", "0", 0);
        // gamma = 1, D = 3 (1 - delta) = 3/2 for delta = 1/2.
        assert_eq!(a_shift(&GroupSpec::toeplitz(q("1/2")), &t), q("2"));
        assert_eq!(a_shift(&std("1", "2"), &t), q("9/2"));
        assert_eq!(t.p, ExtReal::int(1));
    }

    #[test]
    fn octant_examples() {
        use Half::*;
        assert_eq!(octant_members(q("1"), q("2"), 0, 0, 0), ids(&[(Plus, 2), (Plus, 4)]));
        assert_eq!(octant_members(q("-3"), q("1/2"), 0, 0, 0), ids(&[(Plus, 2), (Plus, 4)]));
        assert_eq!(octant_members(q("1"), q("2"), 1, 0, 5), ids(&[(Plus, 1)]));
        assert_eq!(octant_members(q("1"), q("2"), -1, 0, 0), ids(&[(Minus, 2), (Minus, 4)]));
    }

    #[test]
    fn dominant_examples() {
        let m2p = OctantId::new(Half::Plus, 2);
        let (one, two) = (q("1"), q("2"));
        assert_eq!(
            dominant_norm_term(m2p, q("3/2"), q("5/2"), 2, 0, 0).unwrap(),
            Monomial::power_of_two(q("5"))
        );
        let m1p = OctantId::new(Half::Plus, 1);
        let d = dominant_norm_term(m1p, one, two, 1, 0, 5).unwrap();
        assert_eq!(DyadicSum::from_monomial(&d).to_rational(), Some(Rational::from_int(20)));
        let m4m = OctantId::new(Half::Minus, 4);
        assert_eq!(
            dominant_norm_term(m4m, one, two, -3, 0, 0).unwrap(),
            Monomial::power_of_two(q("-3"))
        );
        assert!(matches!(
            dominant_norm_term(m1p, one, two, 1, 0, 0),
            Err(Error::NotInOctant { .. })
        ));
        assert!(matches!(
            dominant_norm_term(m1p, q("1/2"), two, 1, 0, 5),
            Err(Error::UncertifiedOctantTable(..))
        ));
    }

    #[test]
    fn tail_estimates() {
        assert_eq!(tail_sum_estimate(1, q("-2")).unwrap(), 1.0);
        assert_eq!(tail_sum_estimate(4, q("-2")).unwrap(), 0.25);
        assert!(matches!(tail_sum_estimate(4, q("-1")), Err(Error::DivergentTail(_))));
        assert!(matches!(tail_sum_estimate(0, q("-2")), Err(Error::InvalidTailStart(0))));
    }
}
