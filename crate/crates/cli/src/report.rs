//! JSON report types and text rendering.
//!
//! Exact quantities serialize as `"num/den"` strings (integers as `"n"`,
//! infinity as `"inf"`); oracle statistics are JSON numbers with 17
//! significant digits, so reading a report back and writing it again
//! reproduces it byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use shearlet_embed::{GroupSpec, ParamTuple, Verdict};

/// A float written with 17 significant digits; non-finite values are the
/// strings `"inf"`, `"-inf"` and `"nan"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig17(pub f64);

impl Sig17 {
    pub fn render(self) -> String {
        let v = self.0;
        if v.is_nan() {
            "nan".into()
        } else if v.is_infinite() {
            if v > 0.0 { "inf" } else { "-inf" }.into()
        } else {
            format!("{v:.16e}")
        }
    }
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let text = self.render();
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
            raw.serialize(serializer)
        } else {
            serializer.serialize_str(&text)
        }
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Sig17)
                .ok_or_else(|| D::Error::custom("number out of range")),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Ok(Sig17(f64::INFINITY)),
                "-inf" => Ok(Sig17(f64::NEG_INFINITY)),
                "nan" => Ok(Sig17(f64::NAN)),
                _ => Err(D::Error::custom(format!("expected a number, got `{s}`"))),
            },
            other => Err(D::Error::custom(format!("expected a number, got {other}"))),
        }
    }
}

/// Output of `decide`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DecideReport {
    pub group: GroupSpec,
    pub params: ParamTuple,
    pub verdict: Verdict,
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn decide_text(report: &DecideReport) -> String {
    let DecideReport {
        group,
        params: t,
        verdict: v,
    } = report;
    let mut out = String::new();
    let _ = writeln!(out, "group:   {group}");
    let _ = writeln!(
        out,
        "tuple:   p={} q={} r={} alpha={} beta={} k={}",
        t.p, t.q, t.r, t.weight.alpha, t.weight.beta, t.k
    );
    let _ = write!(out, "theta:   {}", v.theta);
    if let Some(nec) = v.theta_necessary {
        let _ = write!(out, " (necessary form: {nec})");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "case:    {}", v.case);
    let _ = writeln!(out, "shift:   A = {}", v.a_shift);
    let _ = writeln!(out, "answer:  {}", v.answer);
    let _ = writeln!(out, "trace:");
    for c in &v.trace {
        let mark = if c.satisfied { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  [{mark}] {}: {} {} {}", c.name, c.lhs, c.relation, c.rhs);
    }
    if let Some(f) = &v.failed_first {
        let _ = writeln!(out, "first failed: {f}");
    }
    for n in &v.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}
