//! Numerical classifier for `psi^(a,b) in l^theta(Z^3)`.
//!
//! Partial sums (or suprema for `theta = inf`) are evaluated over a
//! schedule of growing index boxes and the level-to-level trend is
//! classified. Only the raw definition of `psi` is used: for each `n` the
//! exact norm is sampled at three points to recover its affine profile
//! `K (1 + u|m1| + v|m2|)` in the variables where the group acts linearly,
//! and the box sums over `m` are evaluated through the integral
//! representation
//!
//! ```text
//! (1 + u x + v y)^{-s} = Gamma(s)^{-1} int_0^inf t^{s-1} e^{-t} e^{-t u x} e^{-t v y} dt
//! ```
//!
//! which turns every rectangle sum into a one-dimensional integral with a
//! geometric-series integrand. The integral is taken with the trapezoid rule
//! in `log t`, which converges exponentially for this integrand, so the
//! cost per `n` does not depend on the box size.
//!
//! For Toeplitz groups the boxes are taken in the variables `(m1, m1^2 - m2)`;
//! this is a bijection of `Z^3`, so membership is unaffected.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Monomial;
use crate::error::{Error, Result};
use crate::exponents::Rational;
use crate::groups::{matrix_A, FamilyIndex, GroupSpec, IndexedMatrix};
use crate::sequences::{log2_tail_estimate, SummabilityQuery};
use crate::summation::log_sum_exp;

/// One truncation level: `|n| <= n` and `|m1|, |m2| <= m`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct TruncationLevel {
    pub n: u32,
    pub m: f64,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<TruncationLevel>", into = "Vec<TruncationLevel>")]
pub struct TruncationSchedule {
    levels: Vec<TruncationLevel>,
}

impl TruncationSchedule {
    pub const MIN_LEVELS: usize = 4;

    pub fn new(levels: Vec<TruncationLevel>) -> Result<Self> {
        if levels.len() < Self::MIN_LEVELS {
            return Err(Error::InvalidSchedule(format!(
                "need at least {} levels, got {}",
                Self::MIN_LEVELS,
                levels.len()
            )));
        }
        for l in &levels {
            if !(l.m.is_finite() && l.m >= 1.0 && l.m.fract() == 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "m bound {} is not a positive integer",
                    l.m
                )));
            }
            if l.m > 2f64.powi(400) {
                return Err(Error::InvalidSchedule(format!("m bound {} exceeds 2^400", l.m)));
            }
        }
        for w in levels.windows(2) {
            if w[1].n <= w[0].n {
                return Err(Error::InvalidSchedule(format!(
                    "n bounds must increase strictly ({} then {})",
                    w[0].n, w[1].n
                )));
            }
            if w[1].m < 2.0 * w[0].m {
                return Err(Error::InvalidSchedule(format!(
                    "m bounds must at least double ({} then {})",
                    w[0].m, w[1].m
                )));
            }
        }
        Ok(TruncationSchedule { levels })
    }

    /// Levels `(N, 2^{e})` from `(N, e)` pairs.
    pub fn from_exponents(pairs: &[(u32, u32)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(n, e)| TruncationLevel {
                    n,
                    m: 2f64.powi(e as i32),
                })
                .collect(),
        )
    }

    pub fn levels(&self) -> &[TruncationLevel] {
        &self.levels
    }
}

impl Default for TruncationSchedule {
    /// `N = 12, 24, 36, 48, 60` with `M = 2^{4N + 32}`.
    fn default() -> Self {
        let pairs: Vec<(u32, u32)> = [12, 24, 36, 48, 60].iter().map(|&n| (n, 4 * n + 32)).collect();
        Self::from_exponents(&pairs).expect("default schedule is valid")
    }
}

impl TryFrom<Vec<TruncationLevel>> for TruncationSchedule {
    type Error = Error;

    fn try_from(levels: Vec<TruncationLevel>) -> Result<Self> {
        Self::new(levels)
    }
}

impl From<TruncationSchedule> for Vec<TruncationLevel> {
    fn from(s: TruncationSchedule) -> Self {
        s.levels
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest admissible ratio of consecutive increments for `Convergent`.
    pub convergence_ratio: f64,
    /// Smallest admissible level-to-level growth factor for `Divergent`.
    pub divergence_factor: f64,
}

impl Thresholds {
    pub fn new(convergence_ratio: f64, divergence_factor: f64) -> Result<Self> {
        if !(convergence_ratio > 0.0 && convergence_ratio < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "convergence ratio {convergence_ratio} must lie in (0, 1)"
            )));
        }
        if !(divergence_factor > 1.0 && divergence_factor.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "divergence factor {divergence_factor} must exceed 1"
            )));
        }
        Ok(Thresholds {
            convergence_ratio,
            divergence_factor,
        })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            convergence_ratio: 0.5,
            divergence_factor: 4.0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Convergent,
    Divergent,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Convergent => "convergent",
            Classification::Divergent => "divergent",
            Classification::Inconclusive => "inconclusive",
        }
    }
}

/// Per-level values in `log2`. For `theta < inf` the value is the partial
/// sum of `psi^theta` and the increment is the sum over the shell added
/// since the previous level; for `theta = inf` both refer to the box
/// supremum. `-inf` encodes an exact zero.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct LevelStatistic {
    pub n: u32,
    pub m: f64,
    pub log2_value: f64,
    pub log2_increment: Option<f64>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub classification: Classification,
    pub statistics: Vec<LevelStatistic>,
    /// Least-squares slope of `log2_value` against `N`.
    pub growth_rate: f64,
    /// `log2` of the estimated mass beyond the largest `m` box, when the
    /// `m`-sums converge (`b theta > 2`).
    pub m_tail_log2: Option<f64>,
}

/// The norm of `A_{n,m1,m2}` as `2^{log2_k} (1 + u|x| + v|y|)`, where
/// `(x, y) = (m1, m2)` for standard groups and `(m1, m1^2 - m2)` for
/// Toeplitz groups.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct NormProfile {
    pub log2_k: f64,
    pub u: f64,
    pub v: f64,
}

fn family_matrix(group: &GroupSpec, n: i64, x: i64, y: i64) -> IndexedMatrix {
    let (m1, m2) = match group {
        GroupSpec::Standard { .. } => (x, y),
        GroupSpec::Toeplitz { .. } => (x, x * x - y),
    };
    matrix_A(group, FamilyIndex::plus(n, m1, m2))
}

/// `log2` of a sum of nonnegative monomials, each rounded once.
fn log2_monomial_sum<'a>(terms: impl Iterator<Item = &'a Monomial>) -> f64 {
    let logs: Vec<f64> = terms
        .filter(|m| !m.is_zero())
        .map(|m| ((m.coeff as f64).log2() + m.exp.to_f64()) * std::f64::consts::LN_2)
        .collect();
    to_log2(log_sum_exp(&logs))
}

/// Exact entrywise `|A(x, y)| - |A(0, 0)|`.
fn entry_growth(at: &IndexedMatrix, origin: &IndexedMatrix) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(9);
    for (row_a, row_o) in at.entries.iter().zip(&origin.entries) {
        for (a, o) in row_a.iter().zip(row_o) {
            let d = a.abs().try_add(&o.abs().neg()).expect("entries share an exponent");
            assert!(d.coeff >= 0, "norm is not affine in |m|");
            out.push(d);
        }
    }
    out
}

/// Affine profile of the norm at scale `n`, from three exact evaluations
/// of `A_{n,m1,m2}`. Exponents are unrestricted.
pub fn norm_profile(group: &GroupSpec, n: i64) -> NormProfile {
    let origin = family_matrix(group, n, 0, 0);
    let log2_k = log2_monomial_sum(origin.entries.iter().flatten());
    let slope = |x, y| log2_monomial_sum(entry_growth(&family_matrix(group, n, x, y), &origin).iter());
    NormProfile {
        log2_k,
        u: (slope(1, 0) - log2_k).exp2(),
        v: (slope(0, 1) - log2_k).exp2(),
    }
}

/// `sum_{x=lo}^{hi} w(x) e^{-a x}` with `w(0) = 1`, `w(x) = 2` otherwise
/// (the two signs of `m`). `em1 = 1 - e^{-a}`.
fn weighted_geometric(a: f64, em1: f64, lo: f64, hi: f64) -> f64 {
    if lo == 0.0 {
        return 1.0
            + if hi >= 1.0 {
                weighted_geometric(a, em1, 1.0, hi)
            } else {
                0.0
            };
    }
    let len = hi - lo + 1.0;
    if em1 == 0.0 {
        return 2.0 * len;
    }
    2.0 * (-a * lo).exp() * -(-a * len).exp_m1() / em1
}

/// Natural logs of `sum (1 + u|x| + v|y|)^{-s}` over the shells
/// `[-M_l, M_l]^2 \ [-M_{l-1}, M_{l-1}]^2` (the first shell is the full box).
fn ln_shell_sums(u: f64, v: f64, s: f64, bounds: &[f64]) -> Vec<f64> {
    let levels = bounds.len();
    if s == 0.0 {
        return (0..levels)
            .map(|l| {
                let hi = bounds[l];
                if l == 0 {
                    2.0 * (2.0 * hi + 1.0).ln()
                } else {
                    let lo = bounds[l - 1];
                    (4.0 * (hi - lo) * (hi + lo + 1.0)).ln()
                }
            })
            .collect();
    }
    let top = bounds[levels - 1];
    let tau_max = (2.0 * s + 120.0).ln();
    let tau_min = (-(u.max(v) * top).ln()).min(tau_max) - 60.0 / s - 2.0;
    let h = ((tau_max - tau_min) / 20_000.0).max(0.2);
    let steps = ((tau_max - tau_min) / h).ceil() as usize;

    let mut vals: Vec<Vec<f64>> = vec![Vec::with_capacity(steps + 1); levels];
    let mut ax = vec![0.0; levels];
    let mut ay = vec![0.0; levels];
    for k in 0..=steps {
        let tau = tau_min + k as f64 * h;
        let t = tau.exp();
        let ln_w = s * tau - t;
        for (rate, shell) in [(u, &mut ax), (v, &mut ay)] {
            let a = t * rate;
            let em1 = -(-a).exp_m1();
            for l in 0..levels {
                let lo = if l == 0 { 0.0 } else { bounds[l - 1] + 1.0 };
                shell[l] = weighted_geometric(a, em1, lo, bounds[l]);
            }
        }
        let (mut bx, mut by) = (0.0, 0.0);
        for l in 0..levels {
            let bx_prev = bx;
            bx += ax[l];
            by += ay[l];
            let integrand = ax[l] * by + bx_prev * ay[l];
            if integrand > 0.0 {
                vals[l].push(ln_w + integrand.ln());
            }
        }
    }
    let norm = h.ln() - libm::lgamma(s);
    vals.iter().map(|v| norm + log_sum_exp(v)).collect()
}

/// Per-`n` data: natural-log shell sums already multiplied by the `n`
/// factor `2^{n a theta} K^{-s}`.
struct Slab {
    n_abs: u32,
    ln_shells: Vec<f64>,
}

fn to_log2(ln: f64) -> f64 {
    ln / std::f64::consts::LN_2
}

pub fn classify_membership(
    query: &SummabilityQuery,
    schedule: &TruncationSchedule,
    thresholds: &Thresholds,
) -> Result<OracleVerdict> {
    if query.b.is_negative() {
        return Err(Error::NegativeDecay(query.b));
    }
    let statistics = match query.theta.as_finite() {
        Some(theta) => sum_statistics(query, theta, schedule),
        None => sup_statistics(query, schedule),
    };
    let classification = classify(&statistics, thresholds);
    let m_tail_log2 = query
        .theta
        .as_finite()
        .and_then(|theta| m_tail_estimate(query, theta, schedule));
    Ok(OracleVerdict {
        classification,
        growth_rate: fitted_slope(&statistics),
        statistics,
        m_tail_log2,
    })
}

fn sum_statistics(query: &SummabilityQuery, theta: Rational, schedule: &TruncationSchedule) -> Vec<LevelStatistic> {
    let levels = schedule.levels();
    let bounds: Vec<f64> = levels.iter().map(|l| l.m).collect();
    let n_top = levels[levels.len() - 1].n as i64;
    let a_theta = (query.a * theta).to_f64();
    let s = (query.b * theta).to_f64();

    let slabs: Vec<Slab> = (-n_top..=n_top)
        .into_par_iter()
        .map(|n| {
            let p = norm_profile(&query.group, n);
            let ln_scale = (n as f64 * a_theta - s * p.log2_k) * std::f64::consts::LN_2;
            let ln_shells = ln_shell_sums(p.u, p.v, s, &bounds)
                .into_iter()
                .map(|x| x + ln_scale)
                .collect();
            Slab {
                n_abs: n.unsigned_abs() as u32,
                ln_shells,
            }
        })
        .collect();

    let mut stats = Vec::with_capacity(levels.len());
    for (l, level) in levels.iter().enumerate() {
        let value: Vec<f64> = slabs
            .iter()
            .filter(|sl| sl.n_abs <= level.n)
            .flat_map(|sl| sl.ln_shells[..=l].iter().copied())
            .collect();
        let increment = (l > 0).then(|| {
            let prev_n = levels[l - 1].n;
            let terms: Vec<f64> = slabs
                .iter()
                .filter(|sl| sl.n_abs <= level.n)
                .flat_map(|sl| {
                    let from = if sl.n_abs <= prev_n { l } else { 0 };
                    sl.ln_shells[from..=l].iter().copied()
                })
                .collect();
            to_log2(log_sum_exp(&terms))
        });
        stats.push(LevelStatistic {
            n: level.n,
            m: level.m,
            log2_value: to_log2(log_sum_exp(&value)),
            log2_increment: increment,
        });
    }
    stats
}

/// Side of the `m` box scanned for the supremum; the norm is increasing in
/// `|m1|` and `|m2|`, so larger boxes cannot raise it for `b >= 0`.
const SUP_BOX: i64 = 4;

fn sup_statistics(query: &SummabilityQuery, schedule: &TruncationSchedule) -> Vec<LevelStatistic> {
    let levels = schedule.levels();
    let n_top = levels[levels.len() - 1].n as i64;
    let a = query.a.to_f64();
    let b = query.b.to_f64();
    // (|n|, log2 of the supremum over the n slice) for every n.
    let slices: Vec<(u32, i64, f64)> = (-n_top..=n_top)
        .into_par_iter()
        .map(|n| {
            let p = norm_profile(&query.group, n);
            let mut best = f64::NEG_INFINITY;
            let side = SUP_BOX.min(levels[0].m as i64);
            for x in 0..=side {
                for y in 0..=side {
                    let log2_norm = p.log2_k + (p.u * x as f64 + p.v * y as f64).ln_1p() / std::f64::consts::LN_2;
                    best = best.max(n as f64 * a - b * log2_norm);
                }
            }
            (n.unsigned_abs() as u32, n, best)
        })
        .collect();

    let mut stats: Vec<LevelStatistic> = Vec::with_capacity(levels.len());
    for level in levels {
        let value = slices
            .iter()
            .filter(|(abs, _, _)| *abs <= level.n)
            .map(|&(_, _, v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let increment = stats.last().map(|prev| {
            let diff = value.exp2() - prev.log2_value.exp2();
            if diff > 0.0 {
                diff.log2()
            } else {
                f64::NEG_INFINITY
            }
        });
        stats.push(LevelStatistic {
            n: level.n,
            m: level.m,
            log2_value: value,
            log2_increment: increment,
        });
    }
    stats
}

/// Bound on the mass outside the largest `m` box, summed over the `n` range:
/// integrating out one coordinate leaves `(1 + u x)^{1-s}` and the tail of
/// `x^{1-s}` is estimated by `tail_sum_estimate`.
fn m_tail_estimate(query: &SummabilityQuery, theta: Rational, schedule: &TruncationSchedule) -> Option<f64> {
    let s_exact = query.b * theta;
    let rho = Rational::ONE - s_exact;
    let top = schedule.levels()[schedule.levels().len() - 1];
    let log2_m = top.m.log2();
    let log2_tail = log2_tail_estimate(log2_m, rho).ok()?;
    let s = s_exact.to_f64();
    let a_theta = (query.a * theta).to_f64();
    let n_top = top.n as i64;
    let terms: Vec<f64> = (-n_top..=n_top)
        .flat_map(|n| {
            let p = norm_profile(&query.group, n);
            let scale = n as f64 * a_theta - s * p.log2_k;
            [(p.u, p.v), (p.v, p.u)].map(|(outer, inner)| {
                let row = (2.0 / (inner * (s - 1.0)) + 1.0).log2();
                let ln2_sum = 1.0 + (1.0 - s) * outer.log2() + log2_tail - (s - 2.0).log2();
                (scale + row + ln2_sum) * std::f64::consts::LN_2
            })
        })
        .collect();
    Some(to_log2(log_sum_exp(&terms)))
}

fn classify(stats: &[LevelStatistic], thresholds: &Thresholds) -> Classification {
    let log2_ratio = thresholds.convergence_ratio.log2();
    let log2_factor = thresholds.divergence_factor.log2();
    let increments: Vec<f64> = stats.iter().filter_map(|s| s.log2_increment).collect();
    let convergent = increments.windows(2).skip(1).all(|w| {
        let (prev, next) = (w[0], w[1]);
        next == f64::NEG_INFINITY || next <= prev + log2_ratio
    });
    if convergent {
        return Classification::Convergent;
    }
    let divergent = stats
        .windows(2)
        .skip(1)
        .all(|w| w[1].log2_value >= w[0].log2_value + log2_factor);
    if divergent {
        return Classification::Divergent;
    }
    Classification::Inconclusive
}

fn fitted_slope(stats: &[LevelStatistic]) -> f64 {
    let pts: Vec<(f64, f64)> = stats
        .iter()
        .filter(|s| s.log2_value.is_finite())
        .map(|s| (s.n as f64, s.log2_value))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
