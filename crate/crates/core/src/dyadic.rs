//! Symbolic values of the form `sum c_j 2^{e_j}` with rational exponents.
//!
//! A [`DyadicSum`] is kept in a canonical form keyed by the fractional part
//! of each exponent. The numbers `2^{f}` for distinct `f` in `[0, 1)` are
//! linearly independent over the rationals, so two sums are equal exactly
//! when their canonical forms are.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use smallvec::SmallVec;

use crate::exponents::Rational;

/// `coeff * 2^exp`, normalised so that `coeff` is odd (or zero with
/// exponent zero); equal values therefore have equal representations.
/// Build values through [`Monomial::new`] to keep the normal form.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: i128,
    pub exp: Rational,
}

impl Monomial {
    pub const ZERO: Monomial = Monomial {
        coeff: 0,
        exp: Rational::ZERO,
    };

    pub fn new(coeff: i128, exp: Rational) -> Self {
        if coeff == 0 {
            return Monomial::ZERO;
        }
        let tz = coeff.trailing_zeros();
        if tz == 0 {
            return Monomial { coeff, exp };
        }
        Monomial {
            coeff: coeff >> tz,
            exp: exp + Rational::from_int(tz as i128),
        }
    }

    /// `2^exp`.
    pub fn power_of_two(exp: Rational) -> Self {
        Monomial { coeff: 1, exp }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    pub fn abs(&self) -> Self {
        Monomial::new(self.coeff.abs(), self.exp)
    }

    pub fn neg(&self) -> Self {
        Monomial::new(-self.coeff, self.exp)
    }

    pub fn scale(&self, c: i128) -> Self {
        Monomial::new(self.coeff.checked_mul(c).expect("coefficient overflow"), self.exp)
    }

    pub fn mul(&self, other: &Monomial) -> Self {
        if self.is_zero() || other.is_zero() {
            return Monomial::ZERO;
        }
        Monomial::new(
            self.coeff.checked_mul(other.coeff).expect("coefficient overflow"),
            self.exp + other.exp,
        )
    }

    /// Reciprocal of a unit monomial `+-2^e`; other coefficients have no
    /// monomial reciprocal and yield `None`.
    pub fn recip_unit(&self) -> Option<Self> {
        match self.coeff {
            1 | -1 => Some(Monomial::new(self.coeff, -self.exp)),
            _ => None,
        }
    }

    /// Sum of two monomials when it is again a monomial.
    pub fn try_add(&self, other: &Monomial) -> Option<Self> {
        if self.is_zero() {
            Some(*other)
        } else if other.is_zero() {
            Some(*self)
        } else {
            // Normal forms with an integral exponent gap are aligned by
            // shifting the larger exponent into the coefficient.
            let gap = self.exp - other.exp;
            if !gap.is_integer() {
                return None;
            }
            let (lo, hi) = if gap.is_negative() {
                (self, other)
            } else {
                (other, self)
            };
            let shift = u32::try_from(gap.abs().numer()).ok().filter(|s| *s < 100)?;
            let hi_coeff = hi.coeff.checked_mul(1i128 << shift).expect("coefficient overflow");
            Some(Monomial::new(
                lo.coeff.checked_add(hi_coeff).expect("coefficient overflow"),
                lo.exp,
            ))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff as f64 * self.exp.to_f64().exp2()
    }

    /// Exact comparison of two nonnegative monomials.
    ///
    /// Panics if either coefficient is negative.
    pub fn cmp_nonneg(&self, other: &Monomial) -> Ordering {
        assert!(self.coeff >= 0 && other.coeff >= 0, "cmp_nonneg on negative monomial");
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // Compare c1 2^{p/q} against c2, where p/q = e1 - e2.
        let d = self.exp - other.exp;
        let approx = (self.coeff as f64).log2() + d.to_f64() - (other.coeff as f64).log2();
        if approx.abs() > 1e-6 {
            return if approx > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        // Raise both sides to the q-th power: c1^q 2^p versus c2^q.
        let q = u32::try_from(d.denom()).expect("exponent denominator too large");
        let p = d.numer();
        let mut lhs = BigInt::from(self.coeff).pow(q);
        let mut rhs = BigInt::from(other.coeff).pow(q);
        let shift = usize::try_from(p.unsigned_abs()).expect("exponent too large");
        if p >= 0 {
            lhs <<= shift;
        } else {
            rhs <<= shift;
        }
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else if self.exp.is_zero() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}*2^({})", self.coeff, self.exp)
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn pow2(k: i128) -> Rational {
    assert!(k.abs() <= 120, "dyadic exponent {k} out of range");
    if k >= 0 {
        Rational::from_int(1i128 << k)
    } else {
        Rational::dyadic(1, (-k) as u32)
    }
}

/// Canonical exact sum `sum_f c_f 2^f` with `f` in `[0, 1)` and `c_f` a
/// nonzero rational, sorted by `f`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicSum {
    terms: SmallVec<[(Rational, Rational); 4]>,
}

impl DyadicSum {
    pub fn zero() -> Self {
        DyadicSum::default()
    }

    pub fn one() -> Self {
        DyadicSum::from_rational(Rational::ONE)
    }

    pub fn from_rational(c: Rational) -> Self {
        let mut s = DyadicSum::zero();
        s.add_term(Rational::ZERO, c);
        s
    }

    pub fn from_monomial(m: &Monomial) -> Self {
        let mut s = DyadicSum::zero();
        s.add_monomial(m);
        s
    }

    /// `c * 2^e` for rational `c`.
    pub fn scaled_power(c: Rational, e: Rational) -> Self {
        let mut s = DyadicSum::zero();
        s.add_term(e.fract(), c * pow2(e.floor()));
        s
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, frac: Rational, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|(f, _)| f.cmp(&frac)) {
            Ok(i) => {
                let sum = self.terms[i].1 + c;
                if sum.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].1 = sum;
                }
            }
            Err(i) => self.terms.insert(i, (frac, c)),
        }
    }

    pub fn add_monomial(&mut self, m: &Monomial) {
        if m.is_zero() {
            return;
        }
        let (fl, fr) = (m.exp.floor(), m.exp.fract());
        let c = if fl == 0 {
            Rational::from_int(m.coeff)
        } else {
            Rational::from_int(m.coeff) * pow2(fl)
        };
        self.add_term(fr, c);
    }

    pub fn add(&self, other: &DyadicSum) -> DyadicSum {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(*f, *c);
        }
        out
    }

    pub fn neg(&self) -> DyadicSum {
        DyadicSum {
            terms: self.terms.iter().map(|(f, c)| (*f, -*c)).collect(),
        }
    }

    pub fn sub(&self, other: &DyadicSum) -> DyadicSum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &DyadicSum) -> DyadicSum {
        let mut out = DyadicSum::zero();
        for (f1, c1) in &self.terms {
            for (f2, c2) in &other.terms {
                let e = *f1 + *f2;
                out.add_term(e.fract(), *c1 * *c2 * pow2(e.floor()));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> DyadicSum {
        self.mul(&DyadicSum::from_monomial(m))
    }

    pub fn pow(&self, k: u32) -> DyadicSum {
        let mut acc = DyadicSum::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reciprocal, available only for single-term sums.
    pub fn recip(&self) -> Option<DyadicSum> {
        match self.terms.as_slice() {
            [(f, c)] if f.is_zero() => Some(DyadicSum::from_rational(c.recip())),
            [(f, c)] => Some(DyadicSum::scaled_power(c.recip(), -*f)),
            _ => None,
        }
    }

    /// The value as a rational, when no irrational power of two survives.
    pub fn to_rational(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::ZERO),
            [(f, c)] if f.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(f, c)| c.to_f64() * f.to_f64().exp2()).sum()
    }

    pub fn log2(&self) -> f64 {
        self.to_f64().log2()
    }
}

impl From<Rational> for DyadicSum {
    fn from(c: Rational) -> Self {
        DyadicSum::from_rational(c)
    }
}

impl fmt::Display for DyadicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (fr, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if fr.is_zero() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*2^({fr})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DyadicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `2^scale_exp * base^power` with `base > 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PowerTerm {
    pub scale_exp: Rational,
    pub base: DyadicSum,
    pub power: Rational,
}

impl PowerTerm {
    pub fn log2(&self) -> f64 {
        self.scale_exp.to_f64() + self.power.to_f64() * self.base.log2()
    }

    /// Exact evaluation when the power is an integer and, for negative
    /// powers, the base has a reciprocal.
    pub fn to_dyadic(&self) -> Option<DyadicSum> {
        if !self.power.is_integer() {
            return None;
        }
        let k = self.power.numer();
        let magnitude = u32::try_from(k.unsigned_abs()).ok()?;
        let base = if k >= 0 { self.base.clone() } else { self.base.recip()? };
        Some(
            base.pow(magnitude)
                .mul_monomial(&Monomial::power_of_two(self.scale_exp)),
        )
    }
}

/// A positive real given as a finite sum of [`PowerTerm`]s.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExactValue {
    pub terms: SmallVec<[PowerTerm; 2]>,
}

impl ExactValue {
    pub fn single(term: PowerTerm) -> Self {
        let mut terms = SmallVec::new();
        terms.push(term);
        ExactValue { terms }
    }

    pub fn plus(mut self, other: ExactValue) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn to_dyadic(&self) -> Option<DyadicSum> {
        let mut acc = DyadicSum::zero();
        for t in &self.terms {
            acc = acc.add(&t.to_dyadic()?);
        }
        Some(acc)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.to_dyadic()?.to_rational()
    }

    pub fn log2(&self) -> f64 {
        let logs: SmallVec<[f64; 2]> = self.terms.iter().map(PowerTerm::log2).collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return top;
        }
        top + logs.iter().map(|l| (l - top).exp2()).sum::<f64>().log2()
    }

    pub fn to_f64(&self) -> f64 {
        self.log2().exp2()
    }

    /// Ordering that is exact whenever both values have exact dyadic forms
    /// with equal irrational parts, and otherwise falls back to a log-domain
    /// comparison that refuses to answer inside its error band.
    pub fn cmp_certified(&self, other: &ExactValue) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (self.to_dyadic(), other.to_dyadic()) {
            if let Some(d) = a.sub(&b).to_rational() {
                return Some(d.cmp(&Rational::ZERO));
            }
        }
        let (a, b) = (self.log2(), other.log2());
        let tol = 1e-9 * (1.0 + a.abs().max(b.abs()));
        if (a - b).abs() <= tol {
            None
        } else {
            a.partial_cmp(&b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_merges_powers() {
        let mut s = DyadicSum::zero();
        s.add_monomial(&Monomial::new(3, q("3/2")));
        s.add_monomial(&Monomial::new(1, q("1/2")));
        // 3*2^{3/2} + 2^{1/2} = 7*2^{1/2}
        assert_eq!(s, DyadicSum::scaled_power(Rational::from_int(7), q("1/2")));
        assert_eq!(s.terms().len(), 1);
    }

    #[test]
    fn cancellation_gives_zero() {
        let a = DyadicSum::from_monomial(&Monomial::new(2, q("-1/3")));
        let b = DyadicSum::from_monomial(&Monomial::new(1, q("2/3")));
        assert!(a.sub(&b).is_zero());
    }

    #[test]
    fn squares_of_roots_are_rational() {
        let r = DyadicSum::from_monomial(&Monomial::power_of_two(q("1/2")));
        assert_eq!(r.mul(&r).to_rational(), Some(Rational::from_int(2)));
        let c = DyadicSum::from_monomial(&Monomial::power_of_two(q("1/3")));
        assert_eq!(c.pow(3).to_rational(), Some(Rational::from_int(2)));
    }

    #[test]
    fn monomials_have_a_normal_form() {
        assert_eq!(Monomial::new(12, q("1/2")), Monomial::new(3, q("5/2")));
        assert_eq!(
            Monomial::new(4, q("1")).try_add(&Monomial::new(-7, q("1"))),
            Some(Monomial::new(-3, q("1")))
        );
        assert_eq!(
            Monomial::new(4, Rational::ZERO).try_add(&Monomial::new(-7, Rational::ZERO)),
            Some(Monomial::new(-3, Rational::ZERO))
        );
        assert_eq!(
            Monomial::new(1, q("1/2")).try_add(&Monomial::new(1, Rational::ZERO)),
            None
        );
    }

    #[test]
    fn monomial_comparison_is_exact() {
        // 2^{1/2} * 5 vs 7: 50 > 49.
        let a = Monomial::new(5, q("1/2"));
        let b = Monomial::new(7, Rational::ZERO);
        assert_eq!(a.cmp_nonneg(&b), Ordering::Greater);
        assert_eq!(
            Monomial::new(4, q("1")).cmp_nonneg(&Monomial::new(1, q("3"))),
            Ordering::Equal
        );
        assert_eq!(Monomial::ZERO.cmp_nonneg(&Monomial::ZERO), Ordering::Equal);
        assert_eq!(Monomial::ZERO.cmp_nonneg(&b), Ordering::Less);
        // Near-ties that f64 cannot separate reliably are settled exactly.
        let x = Monomial::new(1, q("10/7"));
        let y = Monomial::new(1, q("10/7"));
        assert_eq!(x.cmp_nonneg(&y), Ordering::Equal);
    }

    #[test]
    fn power_term_evaluation() {
        let t = PowerTerm {
            scale_exp: q("-1"),
            base: DyadicSum::from_rational(Rational::from_int(3)),
            power: q("-2"),
        };
        assert_eq!(ExactValue::single(t.clone()).to_rational(), Some(q("1/18")));
        let half = PowerTerm { power: q("1/2"), ..t };
        assert!(half.to_dyadic().is_none());
        assert!((half.log2() - (-1.0 + 0.5 * 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn certified_comparison() {
        let two = ExactValue::single(PowerTerm {
            scale_exp: Rational::ZERO,
            base: DyadicSum::from_rational(Rational::from_int(4)),
            power: q("1/2"),
        });
        let also_two = ExactValue::single(PowerTerm {
            scale_exp: Rational::ONE,
            base: DyadicSum::one(),
            power: Rational::ONE,
        });
        // sqrt(4) against 2 is a tie the log domain cannot certify.
        assert_eq!(two.cmp_certified(&also_two), None);
        let three = ExactValue::single(PowerTerm {
            scale_exp: Rational::ZERO,
            base: DyadicSum::from_rational(Rational::from_int(3)),
            power: Rational::ONE,
        });
        assert_eq!(two.cmp_certified(&three), Some(Ordering::Less));
        assert_eq!(three.cmp_certified(&also_two), Some(Ordering::Greater));
    }
}
