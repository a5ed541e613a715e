//! Cartesian parameter sweeps over the decision engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shearlet_embed::{decide, ExtReal, GroupSpec, ParamTuple, Rational, ThetaValue, WeightSpec};

use crate::config::Config;
use crate::error::{CliError, Result};

pub const KEYS: &[&str] = &[
    "group", "lambda1", "lambda2", "delta", "p", "q", "r", "alpha", "beta", "k", "format", "max_rows",
];

pub const DEFAULT_MAX_ROWS: usize = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Standard,
    Toeplitz,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(Family::Standard),
            "toeplitz" => Ok(Family::Toeplitz),
            _ => Err(format!("unknown group family `{s}` (standard or toeplitz)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub lambda1: Vec<Rational>,
    pub lambda2: Vec<Rational>,
    pub delta: Vec<Rational>,
    pub p: Vec<ExtReal>,
    pub q: Vec<ExtReal>,
    pub r: Vec<ExtReal>,
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub k: Vec<u32>,
    pub max_rows: usize,
}

impl SweepConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        c.check_keys(KEYS)?;
        let families: Vec<Family> = c.list("group")?;
        let optional = |key: &str, needed: bool| -> Result<Vec<Rational>> {
            if needed || c.contains(key) {
                c.list(key)
            } else {
                Ok(vec![])
            }
        };
        let has_standard = families.contains(&Family::Standard);
        let cfg = SweepConfig {
            lambda1: optional("lambda1", has_standard)?,
            lambda2: optional("lambda2", has_standard)?,
            delta: optional("delta", families.contains(&Family::Toeplitz))?,
            families,
            p: c.list("p")?,
            q: c.list("q")?,
            r: c.list("r")?,
            alpha: c.list("alpha")?,
            beta: c.list("beta")?,
            k: c.list("k")?,
            max_rows: c.scalar("max_rows")?.unwrap_or(DEFAULT_MAX_ROWS),
        };
        if let Some(b) = cfg.beta.iter().find(|b| b.is_negative()) {
            return Err(shearlet_embed::Error::NegativeShearWeight(*b).into());
        }
        Ok(cfg)
    }

    fn groups(&self) -> Vec<GroupSpec> {
        let mut out = Vec::new();
        for f in &self.families {
            match f {
                Family::Standard => {
                    for &l1 in &self.lambda1 {
                        for &l2 in &self.lambda2 {
                            out.push(GroupSpec::standard(l1, l2));
                        }
                    }
                }
                Family::Toeplitz => out.extend(self.delta.iter().map(|&d| GroupSpec::toeplitz(d))),
            }
        }
        out
    }

    /// Number of tuples, saturating at `usize::MAX`.
    pub fn size(&self) -> usize {
        let groups = self
            .families
            .iter()
            .map(|f| match f {
                Family::Standard => self.lambda1.len().saturating_mul(self.lambda2.len()),
                Family::Toeplitz => self.delta.len(),
            })
            .fold(0usize, usize::saturating_add);
        [
            self.p.len(),
            self.q.len(),
            self.r.len(),
            self.alpha.len(),
            self.beta.len(),
            self.k.len(),
        ]
        .into_iter()
        .fold(groups, usize::saturating_mul)
    }

    /// Every tuple, in lexicographic order of the configured lattices.
    pub fn tuples(&self) -> Result<Vec<(GroupSpec, ParamTuple)>> {
        let n = self.size();
        if n > self.max_rows {
            return Err(CliError::Usage(format!(
                "sweep of {n} tuples exceeds max_rows = {}",
                self.max_rows
            )));
        }
        let mut out = Vec::with_capacity(n);
        for g in self.groups() {
            for &p in &self.p {
                for &q in &self.q {
                    for &r in &self.r {
                        for &alpha in &self.alpha {
                            for &beta in &self.beta {
                                let weight = WeightSpec::new(alpha, beta)?;
                                out.extend(self.k.iter().map(|&k| (g, ParamTuple::new(p, q, r, weight, k))));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One CSV line / JSON row. Field order is the CSV column order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub group: String,
    pub lambda1: Option<Rational>,
    pub lambda2: Option<Rational>,
    pub delta: Option<Rational>,
    pub p: ExtReal,
    pub q: ExtReal,
    pub r: ExtReal,
    pub alpha: Rational,
    pub beta: Rational,
    pub k: u32,
    pub theta: ThetaValue,
    pub case: String,
    pub answer: String,
    pub failed_first: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub tuples: usize,
    pub rows: Vec<SweepRow>,
}

pub fn run(tuples: &[(GroupSpec, ParamTuple)]) -> Result<Vec<SweepRow>> {
    tuples
        .par_iter()
        .map(|(g, t)| {
            let v = decide(g, t)?;
            let (family, lambda1, lambda2, delta) = match *g {
                GroupSpec::Standard { lambda1, lambda2 } => ("standard", Some(lambda1), Some(lambda2), None),
                GroupSpec::Toeplitz { delta } => ("toeplitz", None, None, Some(delta)),
            };
            Ok(SweepRow {
                group: family.to_string(),
                lambda1,
                lambda2,
                delta,
                p: t.p,
                q: t.q,
                r: t.r,
                alpha: t.weight.alpha,
                beta: t.weight.beta,
                k: t.k,
                theta: v.theta,
                case: v.case.as_str().to_string(),
                answer: v.answer.as_str().to_string(),
                failed_first: v.failed_first,
            })
        })
        .collect()
}

pub fn to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record([
        "group",
        "lambda1",
        "lambda2",
        "delta",
        "p",
        "q",
        "r",
        "alpha",
        "beta",
        "k",
        "theta",
        "case",
        "answer",
        "failed_first",
    ])?;
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
