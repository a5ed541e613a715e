//! The two families of three-dimensional shearlet dilation groups, their
//! discretised matrix families and the weights built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicSum, ExactValue, Monomial, PowerTerm};
use crate::error::{Error, Result};
use crate::exponents::{ExtReal, Rational};

/// A standard group with scaling exponents `(lambda1, lambda2)` or a
/// Toeplitz group with parameter `delta`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Standard { lambda1: Rational, lambda2: Rational },
    Toeplitz { delta: Rational },
}

impl GroupSpec {
    pub fn standard(lambda1: Rational, lambda2: Rational) -> Self {
        GroupSpec::Standard { lambda1, lambda2 }
    }

    pub fn toeplitz(delta: Rational) -> Self {
        GroupSpec::Toeplitz { delta }
    }

    /// Exponents of the diagonal scaling after the leading `2^n`:
    /// `(lambda1, lambda2)` or `(1 - delta, 1 - 2 delta)`.
    pub fn diagonal_exponents(&self) -> (Rational, Rational) {
        match *self {
            GroupSpec::Standard { lambda1, lambda2 } => (lambda1, lambda2),
            GroupSpec::Toeplitz { delta } => (Rational::ONE - delta, Rational::ONE - Rational::from_int(2) * delta),
        }
    }

    /// `D` with `|det A_n| = 2^{n D}`.
    pub fn det_exponent(&self) -> Rational {
        let (e1, e2) = self.diagonal_exponents();
        Rational::ONE + e1 + e2
    }

    /// The standard group with the same diagonal scaling, exponents sorted.
    pub fn canonical_pair(&self) -> (Rational, Rational) {
        let (e1, e2) = self.diagonal_exponents();
        if e1 <= e2 {
            (e1, e2)
        } else {
            (e2, e1)
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Standard { lambda1, lambda2 } => write!(f, "standard({lambda1}, {lambda2})"),
            GroupSpec::Toeplitz { delta } => write!(f, "toeplitz({delta})"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i128 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FamilyIndex {
    pub n: i64,
    pub m1: i64,
    pub m2: i64,
    pub eps: Sign,
}

impl FamilyIndex {
    pub fn new(n: i64, m1: i64, m2: i64, eps: Sign) -> Self {
        FamilyIndex { n, m1, m2, eps }
    }

    pub fn plus(n: i64, m1: i64, m2: i64) -> Self {
        FamilyIndex::new(n, m1, m2, Sign::Plus)
    }

    pub fn with_n(self, n: i64) -> Self {
        FamilyIndex { n, ..self }
    }
}

/// Shear weight `v(h) = |h_11|^alpha ||h^{-T}||^beta`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: Rational,
    pub beta: Rational,
}

impl WeightSpec {
    pub fn new(alpha: Rational, beta: Rational) -> Result<Self> {
        if beta.is_negative() {
            return Err(Error::NegativeShearWeight(beta));
        }
        Ok(WeightSpec { alpha, beta })
    }
}

/// A 3x3 matrix whose entries are single signed dyadic monomials.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct IndexedMatrix {
    pub entries: [[Monomial; 3]; 3],
}

impl IndexedMatrix {
    pub fn identity() -> Self {
        let one = Monomial::new(1, Rational::ZERO);
        let z = Monomial::ZERO;
        IndexedMatrix {
            entries: [[one, z, z], [z, one, z], [z, z, one]],
        }
    }

    pub fn from_integers(rows: [[i128; 3]; 3]) -> Self {
        let mut entries = [[Monomial::ZERO; 3]; 3];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                entries[i][j] = Monomial::new(*v, Rational::ZERO);
            }
        }
        IndexedMatrix { entries }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = [[Monomial::ZERO; 3]; 3];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.entries[j][i];
            }
        }
        IndexedMatrix { entries }
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.entries[1][0].is_zero() && self.entries[2][0].is_zero() && self.entries[2][1].is_zero()
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.transpose().is_upper_triangular()
    }

    /// `self * other^T`, exact. Zero entries are skipped, which makes the
    /// product of two lower-triangular factors cheap.
    pub fn mul_transpose(&self, other: &IndexedMatrix) -> [[DyadicSum; 3]; 3] {
        let mut out: [[DyadicSum; 3]; 3] = Default::default();
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..3 {
                    let (x, y) = (&self.entries[i][k], &other.entries[j][k]);
                    if !x.is_zero() && !y.is_zero() {
                        cell.add_monomial(&x.mul(y));
                    }
                }
            }
        }
        out
    }

    /// Inverse of an upper-triangular matrix with unit-coefficient
    /// diagonal, entrywise monomial. Returns `None` when the inverse leaves
    /// the monomial form.
    pub fn inverse_upper(&self) -> Option<IndexedMatrix> {
        if !self.is_upper_triangular() {
            return None;
        }
        let u = &self.entries;
        let d1 = u[0][0].recip_unit()?;
        let d2 = u[1][1].recip_unit()?;
        let d3 = u[2][2].recip_unit()?;
        let x12 = u[0][1].mul(&d1).mul(&d2).neg();
        let x23 = u[1][2].mul(&d2).mul(&d3).neg();
        let x13 = u[0][1]
            .mul(&u[1][2])
            .try_add(&u[0][2].mul(&u[1][1]).neg())?
            .mul(&d1)
            .mul(&d2)
            .mul(&d3);
        let z = Monomial::ZERO;
        Some(IndexedMatrix {
            entries: [[d1, x12, x13], [z, d2, x23], [z, z, d3]],
        })
    }

    /// Leibniz determinant, exact.
    pub fn det(&self) -> DyadicSum {
        const PERMS: [([usize; 3], i128); 6] = [
            ([0, 1, 2], 1),
            ([1, 2, 0], 1),
            ([2, 0, 1], 1),
            ([0, 2, 1], -1),
            ([2, 1, 0], -1),
            ([1, 0, 2], -1),
        ];
        let mut acc = DyadicSum::zero();
        for (perm, sign) in PERMS {
            let term = self.entries[0][perm[0]]
                .mul(&self.entries[1][perm[1]])
                .mul(&self.entries[2][perm[2]])
                .scale(sign);
            acc.add_monomial(&term);
        }
        acc
    }
}

impl fmt::Display for IndexedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{}, {}, {}]", row[0], row[1], row[2])?;
        }
        f.write_str("]")
    }
}

/// Whether every entry of an exact matrix product equals the identity.
pub fn is_identity(m: &[[DyadicSum; 3]; 3]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, cell)| {
            let want = if i == j { Rational::ONE } else { Rational::ZERO };
            cell.to_rational() == Some(want)
        })
    })
}

#[allow(non_snake_case)]
pub fn matrix_B(group: &GroupSpec, idx: FamilyIndex) -> IndexedMatrix {
    let n = Rational::from(idx.n);
    let eps = idx.eps.value();
    let p = |e: Rational, c: i64| Monomial::new(eps * c as i128, e);
    let z = Monomial::ZERO;
    let (e1, e2) = group.diagonal_exponents();
    let (m1, m2) = (idx.m1, idx.m2);
    let entries = match group {
        GroupSpec::Standard { .. } => [
            [p(n, 1), p(n, m1), p(n, m2)],
            [z, p(n * e1, 1), z],
            [z, z, p(n * e2, 1)],
        ],
        GroupSpec::Toeplitz { .. } => [
            [p(n, 1), p(n, m1), p(n, m2)],
            [z, p(n * e1, 1), p(n * e1, m1)],
            [z, z, p(n * e2, 1)],
        ],
    };
    IndexedMatrix { entries }
}

/// `(B with n -> -n)^{-T}`, so that norms and determinants grow like
/// positive powers of `2^n`.
#[allow(non_snake_case)]
pub fn matrix_A(group: &GroupSpec, idx: FamilyIndex) -> IndexedMatrix {
    matrix_B(group, idx.with_n(-idx.n))
        .inverse_upper()
        .expect("family matrices are unipotent up to dyadic scaling")
        .transpose()
}

/// Entrywise absolute sum.
pub fn norm_sum(m: &IndexedMatrix) -> DyadicSum {
    let mut acc = DyadicSum::zero();
    for row in &m.entries {
        for e in row {
            acc.add_monomial(&e.abs());
        }
    }
    acc
}

/// `|det m|` as a single dyadic monomial. Family matrices are triangular;
/// panics for matrices whose determinant is not of this form.
pub fn det_abs(m: &IndexedMatrix) -> Monomial {
    if m.is_upper_triangular() || m.is_lower_triangular() {
        let e = &m.entries;
        return e[0][0].mul(&e[1][1]).mul(&e[2][2]).abs();
    }
    let d = m.det();
    match d.terms() {
        [(f, c)] if c.is_integer() => Monomial::new(c.abs().numer(), *f),
        _ => panic!("determinant {d} is not a dyadic monomial"),
    }
}

/// `2^n + 2^{n e1}(1 + |m1|) + 2^{n e2}(1 + |m2|)`: the norm of a
/// standard-group matrix in closed form.
pub fn standard_norm_closed_form(lambda1: Rational, lambda2: Rational, n: i64, m1: i64, m2: i64) -> DyadicSum {
    let n = Rational::from(n);
    let mut acc = DyadicSum::zero();
    acc.add_monomial(&Monomial::power_of_two(n));
    acc.add_monomial(&Monomial::new(1 + m1.unsigned_abs() as i128, n * lambda1));
    acc.add_monomial(&Monomial::new(1 + m2.unsigned_abs() as i128, n * lambda2));
    acc
}

/// `u_{n,m,eps} = 2^{-n D (1/2 - 1/r)} 2^{-n alpha} ||A||^beta`.
pub fn weight_u(group: &GroupSpec, idx: FamilyIndex, ws: &WeightSpec, r: ExtReal) -> ExactValue {
    let n = Rational::from(idx.n);
    let scale = -(n * group.det_exponent() * (Rational::HALF - r.recip())) - n * ws.alpha;
    ExactValue::single(PowerTerm {
        scale_exp: scale,
        base: norm_sum(&matrix_A(group, idx)),
        power: ws.beta,
    })
}

/// `w_{n,m,eps} = |det A|^{1/p - 1/q} (1 + ||A||^k)`.
pub fn weight_w(group: &GroupSpec, idx: FamilyIndex, p: ExtReal, q: ExtReal, k: u32) -> ExactValue {
    let a = matrix_A(group, idx);
    let det = det_abs(&a);
    debug_assert_eq!(det.coeff, 1);
    let base = DyadicSum::one().add(&norm_sum(&a).pow(k));
    ExactValue::single(PowerTerm {
        scale_exp: det.exp * (p.recip() - q.recip()),
        base,
        power: Rational::ONE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn std(l1: &str, l2: &str) -> GroupSpec {
        GroupSpec::standard(q(l1), q(l2))
    }

    fn toe(d: &str) -> GroupSpec {
        GroupSpec::toeplitz(q(d))
    }

    fn int(x: i128) -> DyadicSum {
        DyadicSum::from_rational(Rational::from_int(x))
    }

    #[test]
    fn b_matrices() {
        assert_eq!(
            matrix_B(&std("1", "1"), FamilyIndex::plus(0, 0, 0)),
            IndexedMatrix::identity()
        );
        assert_eq!(
            matrix_B(&std("1", "2"), FamilyIndex::plus(1, 1, 2)),
            IndexedMatrix::from_integers([[2, 2, 4], [0, 2, 0], [0, 0, 4]]),
        );
        assert_eq!(
            matrix_B(&toe("1/2"), FamilyIndex::plus(0, 1, 0)),
            IndexedMatrix::from_integers([[1, 1, 0], [0, 1, 1], [0, 0, 1]]),
        );
    }

    #[test]
    fn a_matrices() {
        assert_eq!(
            matrix_A(&std("3/2", "-2/3"), FamilyIndex::plus(0, 0, 0)),
            IndexedMatrix::identity()
        );
        assert_eq!(
            matrix_A(&std("1", "2"), FamilyIndex::plus(1, 1, 1)),
            IndexedMatrix::from_integers([[2, 0, 0], [-2, 2, 0], [-4, 0, 4]]),
        );
        assert_eq!(
            matrix_A(&toe("1/2"), FamilyIndex::plus(0, 1, 0)),
            IndexedMatrix::from_integers([[1, 0, 0], [-1, 1, 0], [1, -1, 1]]),
        );
    }

    #[test]
    fn toeplitz_closed_form_entry() {
        // (m1^2 - m2) 2^{n(1 - 2 delta)} in the corner.
        let a = matrix_A(&toe("1/3"), FamilyIndex::plus(3, 2, 7));
        assert_eq!(a.entries[2][0], Monomial::new(4 - 7, Rational::ONE));
        assert_eq!(a.entries[1][0], Monomial::new(-2, Rational::from_int(2)));
        assert_eq!(a.entries[2][1], Monomial::new(-2, Rational::ONE));
    }

    #[test]
    fn minus_sign_negates() {
        let g = std("1/2", "2");
        let plus = matrix_A(&g, FamilyIndex::plus(2, 3, -1));
        let minus = matrix_A(&g, FamilyIndex::new(2, 3, -1, Sign::Minus));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(plus.entries[i][j].neg(), minus.entries[i][j]);
            }
        }
    }

    #[test]
    fn norms() {
        assert_eq!(norm_sum(&IndexedMatrix::identity()), int(3));
        assert_eq!(norm_sum(&matrix_A(&std("1", "2"), FamilyIndex::plus(1, 1, 2))), int(18));
        assert_eq!(norm_sum(&matrix_A(&toe("1/2"), FamilyIndex::plus(0, 1, 0))), int(6));
    }

    #[test]
    fn determinants() {
        assert_eq!(
            det_abs(&IndexedMatrix::identity()),
            Monomial::power_of_two(Rational::ZERO)
        );
        assert_eq!(
            det_abs(&matrix_A(&std("1", "2"), FamilyIndex::plus(1, 5, -3))),
            Monomial::power_of_two(Rational::from_int(4)),
        );
        assert_eq!(
            det_abs(&matrix_A(&toe("1/2"), FamilyIndex::plus(2, 1, 9))),
            Monomial::power_of_two(Rational::from_int(3)),
        );
        // The Leibniz route agrees on a non-integral exponent.
        let a = matrix_A(&std("1/3", "5/2"), FamilyIndex::plus(-3, 4, 2));
        assert_eq!(DyadicSum::from_monomial(&det_abs(&a)), a.det());
    }

    #[test]
    fn weights_u() {
        let one = Some(Rational::ONE);
        let ws0 = WeightSpec::new(q("7/3"), Rational::ZERO).unwrap();
        assert_eq!(
            weight_u(&toe("-1"), FamilyIndex::plus(0, 0, 0), &ws0, ExtReal::int(2)).to_rational(),
            one
        );
        // At n = 0 the norm is 3 + |m1| + |m2|, so m = (1, 0) gives 4.
        let ws = WeightSpec::new(Rational::ZERO, Rational::ONE).unwrap();
        assert_eq!(
            weight_u(&std("1", "1"), FamilyIndex::plus(0, 1, 0), &ws, ExtReal::int(2)).to_rational(),
            Some(Rational::from_int(4)),
        );
        let ws = WeightSpec::new(Rational::ONE, Rational::ZERO).unwrap();
        assert_eq!(
            weight_u(&std("1", "2"), FamilyIndex::plus(1, 0, 0), &ws, ExtReal::Infinite).to_rational(),
            Some(q("1/8")),
        );
    }

    #[test]
    fn weights_w() {
        let two = ExtReal::int(2);
        assert_eq!(
            weight_w(&std("1", "2"), FamilyIndex::plus(0, 0, 0), two, two, 0).to_rational(),
            Some(Rational::from_int(2)),
        );
        assert_eq!(
            weight_w(&std("1", "2"), FamilyIndex::plus(1, 1, 2), ExtReal::int(1), two, 1).to_rational(),
            Some(Rational::from_int(76)),
        );
        assert_eq!(
            weight_w(
                &toe("1/2"),
                FamilyIndex::plus(0, 1, 0),
                ExtReal::int(1),
                ExtReal::int(1),
                2
            )
            .to_rational(),
            Some(Rational::from_int(37)),
        );
    }

    #[test]
    fn negative_beta_rejected() {
        assert_eq!(
            WeightSpec::new(Rational::ZERO, q("-1/2")),
            Err(Error::NegativeShearWeight(q("-1/2")))
        );
    }

    #[test]
    fn canonical_pairs() {
        assert_eq!(toe("1/2").canonical_pair(), (Rational::ZERO, Rational::HALF));
        assert_eq!(std("2", "1").canonical_pair(), (Rational::ONE, Rational::from_int(2)));
        assert_eq!(toe("1/3").det_exponent(), Rational::from_int(2));
    }

    #[test]
    fn group_json_shape() {
        let g = std("1/2", "2");
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"kind":"standard","lambda1":"1/2","lambda2":"2"}"#);
        assert_eq!(serde_json::from_str::<GroupSpec>(&s).unwrap(), g);
    }
}
