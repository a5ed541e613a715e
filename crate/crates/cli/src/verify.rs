//! Analytic membership against the numerical oracle.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use shearlet_embed::analytic::psi_in_ltheta;
use shearlet_embed::oracle::TruncationLevel;
use shearlet_embed::sequences::SummabilityQuery;
use shearlet_embed::verification::{margin_grid, Agreement, MarginPoint};
use shearlet_embed::{
    classify_membership, Classification, GroupSpec, Rational, ThetaValue, Thresholds, TruncationSchedule,
};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::Sig17;

pub const KEYS: &[&str] = &[
    "margin",
    "schedule",
    "convergence_ratio",
    "divergence_factor",
    "format",
    "group",
    "lambda1",
    "lambda2",
    "delta",
    "a",
    "b",
    "theta",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub margin: Rational,
    pub schedule: TruncationSchedule,
    pub thresholds: Thresholds,
    /// Single-query mode.
    pub point: Option<SummabilityQuery>,
}

/// `N:E` for the level `|n| <= N`, `|m_i| <= 2^E`.
fn parse_level(item: &str) -> Result<(u32, u32)> {
    let bad = || CliError::Usage(format!("schedule: expected `N:E`, got `{item}`"));
    let (n, e) = item.split_once(':').ok_or_else(bad)?;
    Ok((
        n.trim().parse().map_err(|_| bad())?,
        e.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn group_from(c: &Config) -> Result<Option<GroupSpec>> {
    let Some(family) = c.scalar::<String>("group")? else {
        return Ok(None);
    };
    match family.as_str() {
        "standard" => {
            let l1 = c
                .scalar("lambda1")?
                .ok_or_else(|| CliError::Usage("standard group needs lambda1".into()))?;
            let l2 = c
                .scalar("lambda2")?
                .ok_or_else(|| CliError::Usage("standard group needs lambda2".into()))?;
            Ok(Some(GroupSpec::standard(l1, l2)))
        }
        "toeplitz" => {
            let d = c
                .scalar("delta")?
                .ok_or_else(|| CliError::Usage("Toeplitz group needs delta".into()))?;
            Ok(Some(GroupSpec::toeplitz(d)))
        }
        other => Err(CliError::Usage(format!(
            "unknown group family `{other}` (standard or toeplitz)"
        ))),
    }
}

/// A threshold given as a decimal or an exact rational.
struct Real(f64);

impl std::str::FromStr for Real {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let r: Rational = s.parse().map_err(|e: shearlet_embed::Error| e.to_string())?;
        Ok(Real(r.numer() as f64 / r.denom() as f64))
    }
}

impl VerifyConfig {
    pub fn from_config(c: &Config) -> Result<Self> {
        c.check_keys(KEYS)?;
        let schedule = if c.contains("schedule") {
            let pairs = c
                .list::<String>("schedule")?
                .iter()
                .map(|s| parse_level(s))
                .collect::<Result<Vec<_>>>()?;
            TruncationSchedule::from_exponents(&pairs)?
        } else {
            TruncationSchedule::default()
        };
        let defaults = Thresholds::default();
        let thresholds = Thresholds::new(
            c.scalar("convergence_ratio")?
                .map_or(defaults.convergence_ratio, |r: Real| r.0),
            c.scalar("divergence_factor")?
                .map_or(defaults.divergence_factor, |r: Real| r.0),
        )?;
        let point = match group_from(c)? {
            Some(group) => {
                let need = |key: &str| CliError::Usage(format!("single-query verify needs `{key}`"));
                let a = c.scalar("a")?.ok_or_else(|| need("a"))?;
                let b = c.scalar("b")?.ok_or_else(|| need("b"))?;
                let theta: ThetaValue = c.scalar("theta")?.ok_or_else(|| need("theta"))?;
                Some(SummabilityQuery::new(group, a, b, theta)?)
            }
            None if ["a", "b", "theta"].iter().any(|k| c.contains(k)) => {
                return Err(CliError::Usage("a, b and theta need a group".into()));
            }
            None => None,
        };
        let margin = c.scalar("margin")?.unwrap_or(Rational::new(1, 4));
        if margin.is_negative() {
            return Err(CliError::Usage(format!("margin must be nonnegative, got {margin}")));
        }
        Ok(VerifyConfig {
            margin,
            schedule,
            thresholds,
            point,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct ScheduleLevel {
    pub n: u32,
    pub m: Sig17,
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct LevelRecord {
    pub n: u32,
    pub m: Sig17,
    pub log2_value: Sig17,
    pub log2_increment: Option<Sig17>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub group: GroupSpec,
    pub a: Rational,
    pub b: Rational,
    pub theta: ThetaValue,
    pub member: bool,
    pub boundary: bool,
    pub classification: Classification,
    pub agreement: Agreement,
    pub growth_rate: Sig17,
    pub m_tail_log2: Option<Sig17>,
    pub statistics: Vec<LevelRecord>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Summary {
    pub points: usize,
    pub members: usize,
    pub non_members: usize,
    pub boundary: usize,
    pub agree: usize,
    pub inconclusive: usize,
    pub contradictions: usize,
    /// Contradictions at points off every analytic boundary; these fail
    /// the run.
    pub contradictions_off_boundary: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub margin: Option<Rational>,
    pub schedule: Vec<ScheduleLevel>,
    pub convergence_ratio: Sig17,
    pub divergence_factor: Sig17,
    pub summary: Summary,
    pub points: Vec<PointRecord>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.summary.contradictions_off_boundary == 0
    }
}

fn check(point: &MarginPoint, cfg: &VerifyConfig) -> Result<PointRecord> {
    let q = &point.query;
    let v = classify_membership(q, &cfg.schedule, &cfg.thresholds)?;
    Ok(PointRecord {
        group: q.group,
        a: q.a,
        b: q.b,
        theta: q.theta,
        member: point.member,
        boundary: point.boundary,
        classification: v.classification,
        agreement: Agreement::of(point.member, v.classification),
        growth_rate: Sig17(v.growth_rate),
        m_tail_log2: v.m_tail_log2.map(Sig17),
        statistics: v
            .statistics
            .iter()
            .map(|s| LevelRecord {
                n: s.n,
                m: Sig17(s.m),
                log2_value: Sig17(s.log2_value),
                log2_increment: s.log2_increment.map(Sig17),
            })
            .collect(),
    })
}

pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let points = match cfg.point {
        Some(query) => {
            let ans = psi_in_ltheta(&query.group, query.a, query.b, query.theta)?;
            let boundary = ans.conditions.iter().any(|c| c.slack().is_zero());
            vec![MarginPoint {
                query,
                member: ans.member,
                boundary,
            }]
        }
        None => margin_grid(cfg.margin)?,
    };
    let records = points.par_iter().map(|p| check(p, cfg)).collect::<Result<Vec<_>>>()?;
    let mut s = Summary {
        points: records.len(),
        ..Summary::default()
    };
    for r in &records {
        if r.member {
            s.members += 1;
        } else {
            s.non_members += 1;
        }
        s.boundary += r.boundary as usize;
        match r.agreement {
            Agreement::Agree => s.agree += 1,
            Agreement::Inconclusive => s.inconclusive += 1,
            Agreement::Contradiction => {
                s.contradictions += 1;
                s.contradictions_off_boundary += !r.boundary as usize;
            }
        }
    }
    Ok(VerifyReport {
        margin: cfg.point.is_none().then_some(cfg.margin),
        schedule: cfg
            .schedule
            .levels()
            .iter()
            .map(|&TruncationLevel { n, m }| ScheduleLevel { n, m: Sig17(m) })
            .collect(),
        convergence_ratio: Sig17(cfg.thresholds.convergence_ratio),
        divergence_factor: Sig17(cfg.thresholds.divergence_factor),
        summary: s,
        points: records,
    })
}

fn describe(r: &PointRecord) -> String {
    format!("{} a={} b={} theta={}", r.group, r.a, r.b, r.theta)
}

pub fn text(report: &VerifyReport) -> String {
    let s = &report.summary;
    let mut out = String::new();
    if let Some(m) = report.margin {
        let _ = writeln!(out, "margin:          {m}");
    }
    let levels: Vec<String> = report
        .schedule
        .iter()
        .map(|l| format!("{}:2^{}", l.n, l.m.0.log2()))
        .collect();
    let _ = writeln!(out, "schedule:        {}", levels.join(", "));
    let _ = writeln!(
        out,
        "points:          {} ({} members, {} non-members, {} on a boundary)",
        s.points, s.members, s.non_members, s.boundary
    );
    let _ = writeln!(out, "agree:           {}", s.agree);
    let _ = writeln!(out, "inconclusive:    {}", s.inconclusive);
    let _ = writeln!(
        out,
        "contradictions:  {} ({} off boundary)",
        s.contradictions, s.contradictions_off_boundary
    );
    for r in &report.points {
        if report.points.len() == 1 || r.agreement != Agreement::Agree {
            let _ = writeln!(
                out,
                "  {}: analytic {}, oracle {}, growth {} -> {}",
                describe(r),
                if r.member { "member" } else { "non-member" },
                r.classification.as_str(),
                r.growth_rate.render(),
                r.agreement.as_str()
            );
        }
    }
    let _ = writeln!(
        out,
        "result:          {}",
        if report.passed() { "pass" } else { "FAIL" }
    );
    out
}
