//! Exact arithmetic on the query exponents.
//!
//! Group parameters and weights are [`Rational`]s; integrability exponents
//! live in `(0, inf]` and are carried as [`ExtReal`]. The reciprocal of
//! infinity is exactly zero, so every derived quantity (`gamma`, `1/theta`)
//! stays rational and every verdict inequality is decided without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest numerator or denominator accepted by the parser.
///
/// Derived quantities multiply a handful of parsed values together; this
/// bound keeps all of them well inside `i128`.
pub const MAX_PARSED_MAGNITUDE: i128 = 1 << 40;

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    /// Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn from_int(v: i128) -> Self {
        Rational(Ratio::from_integer(v))
    }

    /// `num / 2^k`. Panics if `2^k` does not fit.
    pub fn dyadic(num: i128, k: u32) -> Self {
        reduce_dyadic(num, k)
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> i128 {
        if self.denom() == 1 {
            return self.numer();
        }
        Integer::div_floor(&self.numer(), &self.denom())
    }

    pub fn ceil(&self) -> i128 {
        -Integer::div_floor(&-self.numer(), &self.denom())
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        if self.denom() == 1 {
            return Rational::ZERO;
        }
        *self - Rational::from_int(self.floor())
    }

    /// Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::ONE;
        for _ in 0..exp {
            acc = acc * *self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        // Split into integer and fractional part so large numerators with
        // large denominators do not lose the low bits.
        let q = self.floor();
        let r = self.numer() - q * self.denom();
        q as f64 + r as f64 / self.denom() as f64
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn checked(op: Option<Ratio<i128>>, what: &str) -> Self {
        match op {
            Some(v) => Rational(v),
            None => panic!("rational arithmetic overflow in {what}"),
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v as i128)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_int(v as i128)
    }
}

/// `num / 2^k` reduced by shifting out common factors of two.
fn reduce_dyadic(num: i128, k: u32) -> Rational {
    if num == 0 {
        return Rational::ZERO;
    }
    let tz = num.trailing_zeros().min(k);
    let den = 1i128
        .checked_shl(k - tz)
        .filter(|d| *d > 0)
        .unwrap_or_else(|| overflow("scaling"));
    Rational(Ratio::new_raw(num >> tz, den))
}

/// `Some(k)` when the denominator is `2^k`.
fn dyadic_exponent(r: &Rational) -> Option<u32> {
    let d = r.denom();
    (d & (d - 1) == 0).then(|| d.trailing_zeros())
}

fn fits_i64(v: i128) -> bool {
    v as i64 as i128 == v
}

fn overflow(what: &str) -> ! {
    panic!("rational arithmetic overflow in {what}")
}

// Dyadic denominators (the common case for family exponents) are combined
// by shifts instead of gcd reductions; numerators within i64 cannot
// overflow the i128 intermediates.
impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        if let (Some(a), Some(b)) = (dyadic_exponent(&self), dyadic_exponent(&rhs)) {
            let (n1, n2) = (self.numer(), rhs.numer());
            let k = a.max(b);
            if fits_i64(n1) && fits_i64(n2) && k <= 62 {
                return reduce_dyadic((n1 << (k - a)) + (n2 << (k - b)), k);
            }
        }
        Rational::checked(self.0.checked_add(&rhs.0), "addition")
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + -rhs
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        if let (Some(a), Some(b)) = (dyadic_exponent(&self), dyadic_exponent(&rhs)) {
            let (n1, n2) = (self.numer(), rhs.numer());
            if fits_i64(n1) && fits_i64(n2) && a + b <= 120 {
                return reduce_dyadic(n1 * n2, a + b);
            }
        }
        Rational::checked(self.0.checked_mul(&rhs.0), "multiplication")
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational::checked(self.0.checked_div(&rhs.0), "division")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn parse_integer(input: &str, digits: &str) -> Result<i128> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_error(input, "expected decimal digits"));
    }
    let v: i128 = digits.parse().map_err(|_| parse_error(input, "integer too large"))?;
    if v > MAX_PARSED_MAGNITUDE {
        return Err(parse_error(input, "magnitude exceeds 2^40"));
    }
    Ok(v)
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n`, `n/d` and finite decimals such as `-0.125`; decimals are
    /// converted exactly.
    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let magnitude = if let Some((num, den)) = body.split_once('/') {
            let num = parse_integer(input, num.trim())?;
            let den = parse_integer(input, den.trim())?;
            if den == 0 {
                return Err(parse_error(input, "zero denominator"));
            }
            Rational::new(num, den)
        } else if let Some((int, frac)) = body.split_once('.') {
            let int = if int.is_empty() { 0 } else { parse_integer(input, int)? };
            if frac.len() > 12 {
                return Err(parse_error(input, "more than 12 decimal places"));
            }
            let frac_val = if frac.is_empty() {
                0
            } else {
                parse_integer(input, frac)?
            };
            let scale = 10i128.pow(frac.len() as u32);
            Rational::new(int * scale + frac_val, scale)
        } else {
            Rational::from_int(parse_integer(input, body)?)
        };
        if magnitude.numer() > MAX_PARSED_MAGNITUDE || magnitude.denom() > MAX_PARSED_MAGNITUDE {
            return Err(parse_error(input, "magnitude exceeds 2^40"));
        }
        Ok(if negative { -magnitude } else { magnitude })
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A value in `(0, inf]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtReal {
    Finite(Rational),
    Infinite,
}

impl ExtReal {
    pub fn finite(v: Rational) -> Result<Self> {
        if v.is_positive() {
            Ok(ExtReal::Finite(v))
        } else {
            Err(Error::ExponentOutOfRange(v))
        }
    }

    /// Convenience for literals; panics unless `num/den > 0`.
    pub fn ratio(num: i128, den: i128) -> Self {
        ExtReal::finite(Rational::new(num, den)).expect("exponent must be positive")
    }

    pub fn int(v: i128) -> Self {
        ExtReal::ratio(v, 1)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinite)
    }

    pub fn as_finite(&self) -> Option<Rational> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Infinite => None,
        }
    }

    /// `1/x`, with `1/inf = 0`.
    pub fn recip(&self) -> Rational {
        match self {
            ExtReal::Finite(v) => v.recip(),
            ExtReal::Infinite => Rational::ZERO,
        }
    }

    /// Inverse of [`ExtReal::recip`]: zero maps to infinity.
    pub fn from_recip(r: Rational) -> Result<Self> {
        if r.is_zero() {
            Ok(ExtReal::Infinite)
        } else {
            ExtReal::finite(r.recip())
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64(),
            ExtReal::Infinite => f64::INFINITY,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // 1/x is strictly decreasing on (0, inf].
        other.recip().cmp(&self.recip())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(ExtReal::Infinite);
        }
        ExtReal::finite(s.parse()?)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Summability exponent `theta` in `(0, inf]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaValue(pub ExtReal);

impl ThetaValue {
    pub const INFINITE: ThetaValue = ThetaValue(ExtReal::Infinite);

    /// Panics unless `v > 0`.
    pub fn from_int(v: i128) -> Self {
        ThetaValue(ExtReal::finite(Rational::from_int(v)).expect("theta must be positive"))
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    pub fn recip(&self) -> Rational {
        self.0.recip()
    }

    pub fn as_finite(&self) -> Option<Rational> {
        self.0.as_finite()
    }
}

impl fmt::Display for ThetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for ThetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for ThetaValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(ThetaValue(s.parse()?))
    }
}

/// Conjugate exponent; every `p <= 1` maps to infinity.
pub fn conjugate(p: ExtReal) -> ExtReal {
    match p {
        ExtReal::Infinite => ExtReal::Finite(Rational::ONE),
        ExtReal::Finite(v) if v <= Rational::ONE => ExtReal::Infinite,
        ExtReal::Finite(v) => ExtReal::Finite(v / (v - Rational::ONE)),
    }
}

/// `min{q, q'}`.
pub fn q_down(q: ExtReal) -> ExtReal {
    std::cmp::min(q, conjugate(q))
}

/// `1/2 - 1/r + 1/p - 1/q`.
pub fn gamma(p: ExtReal, q: ExtReal, r: ExtReal) -> Rational {
    Rational::HALF - r.recip() + p.recip() - q.recip()
}

/// `theta = min{q, q'} * (r / min{q, q'})'`, evaluated as
/// `1/theta = 1/q_down - 1/r` once `r` exceeds `q_down`.
pub fn theta_from(q: ExtReal, r: ExtReal) -> ThetaValue {
    theta_with_base(q_down(q), r)
}

/// Same as [`theta_from`] but with the lower exponent supplied directly;
/// used for the necessary-condition form where `q` replaces `q_down`.
pub fn theta_with_base(base: ExtReal, r: ExtReal) -> ThetaValue {
    if r <= base {
        return ThetaValue::INFINITE;
    }
    let inv = base.recip() - r.recip();
    ThetaValue(ExtReal::from_recip(inv).expect("r > base gives a positive reciprocal"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(s: &str) -> ExtReal {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(e("2")), e("2"));
        assert_eq!(conjugate(e("1/2")), ExtReal::Infinite);
        assert_eq!(conjugate(e("4")), e("4/3"));
        assert_eq!(conjugate(e("1")), ExtReal::Infinite);
        assert_eq!(conjugate(ExtReal::Infinite), e("1"));
    }

    #[test]
    fn q_down_examples() {
        assert_eq!(q_down(e("2")), e("2"));
        assert_eq!(q_down(e("1/2")), e("1/2"));
        assert_eq!(q_down(ExtReal::Infinite), e("1"));
        assert_eq!(q_down(e("3")), e("3/2"));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(e("2"), e("2"), e("2")), Rational::ZERO);
        assert_eq!(gamma(e("1"), e("2"), e("1")), Rational::ZERO);
        assert_eq!(gamma(e("1"), e("2"), ExtReal::Infinite), Rational::ONE);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_from(e("2"), e("2")), ThetaValue::INFINITE);
        assert_eq!(theta_from(e("2"), e("4")), ThetaValue(e("4")));
        assert_eq!(theta_from(e("1/2"), e("1")), ThetaValue(e("1")));
        // q = inf has q_down = 1, so theta = r' for r > 1.
        assert_eq!(theta_from(ExtReal::Infinite, e("3")), ThetaValue(e("3/2")));
        assert_eq!(theta_from(e("2"), ExtReal::Infinite), ThetaValue(e("2")));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(q("3/6"), Rational::new(1, 2));
        assert_eq!(q("-0.125"), Rational::new(-1, 8));
        assert_eq!(q(".5"), Rational::HALF);
        assert_eq!(q("+7"), Rational::from_int(7));
        assert_eq!(e("inf"), ExtReal::Infinite);
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("0".parse::<ExtReal>().is_err());
        assert!("-1".parse::<ExtReal>().is_err());
        assert!("99999999999999999999".parse::<Rational>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "-3", "7/2", "-1/3", "inf"] {
            assert_eq!(e_or_q_display(s), s);
        }
    }

    fn e_or_q_display(s: &str) -> String {
        if s == "inf" {
            e(s).to_string()
        } else {
            q(s).to_string()
        }
    }

    #[test]
    fn floor_ceil_fract() {
        assert_eq!(q("-7/2").floor(), -4);
        assert_eq!(q("-7/2").ceil(), -3);
        assert_eq!(q("-7/2").fract(), q("1/2"));
        assert_eq!(q("5").fract(), Rational::ZERO);
    }

    #[test]
    fn ext_order() {
        assert!(e("1/2") < e("2"));
        assert!(e("1000") < ExtReal::Infinite);
        assert_eq!(std::cmp::min(ExtReal::Infinite, e("3")), e("3"));
    }

    fn finite_exponent() -> impl Strategy<Value = ExtReal> {
        (1i128..=64, 1i128..=16).prop_map(|(n, d)| ExtReal::ratio(n, d))
    }

    fn any_exponent() -> impl Strategy<Value = ExtReal> {
        prop_oneof![9 => finite_exponent(), 1 => Just(ExtReal::Infinite)]
    }

    proptest! {
        #[test]
        fn conjugate_is_involution_above_one(p in any_exponent()) {
            prop_assume!(p >= ExtReal::int(1));
            prop_assert_eq!(conjugate(conjugate(p)), p);
        }

        #[test]
        fn conjugate_decreasing(p in any_exponent(), r in any_exponent()) {
            prop_assume!(p >= ExtReal::int(1) && r >= ExtReal::int(1) && p <= r);
            prop_assert!(conjugate(p) >= conjugate(r));
        }

        #[test]
        fn q_down_at_most_two(p in any_exponent()) {
            prop_assert!(q_down(p) <= ExtReal::int(2));
        }

        #[test]
        fn theta_nonincreasing_in_r(qq in any_exponent(), r1 in any_exponent(), r2 in any_exponent()) {
            prop_assume!(r1 <= r2);
            prop_assert!(theta_from(qq, r1) >= theta_from(qq, r2));
        }

        #[test]
        fn theta_reciprocal_identity(qq in any_exponent(), r in any_exponent()) {
            let t = theta_from(qq, r);
            if !t.is_infinite() {
                prop_assert_eq!(t.recip(), q_down(qq).recip() - r.recip());
            } else {
                prop_assert!(r <= q_down(qq));
            }
        }

        #[test]
        fn representation_independent(n in -50i128..50, d in 1i128..20, k in 1i128..20) {
            let a = Rational::new(n, d);
            let b = Rational::new(n * k, d * k);
            prop_assert_eq!(a, b);
            prop_assert_eq!(a.to_string(), b.to_string());
            if n > 0 {
                let (ea, eb) = (ExtReal::finite(a).unwrap(), ExtReal::finite(b).unwrap());
                prop_assert_eq!(conjugate(ea), conjugate(eb));
                prop_assert_eq!(gamma(ea, ea, eb), gamma(eb, eb, ea));
            }
        }

        #[test]
        fn parse_display_round_trip(n in -10_000i128..10_000, d in 1i128..1000) {
            let a = Rational::new(n, d);
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
