//! Flat `key = value` configuration text.
//!
//! Each non-blank line holds one key. Values are a single item or a list
//! `[a, b, c]`; a list item `lo..hi:step` expands to the exact lattice
//! `lo, lo + step, ...` up to and including `hi`. `#` starts a comment.

use std::collections::BTreeMap;
use std::str::FromStr;

use shearlet_embed::Rational;

use crate::error::{CliError, Result};

/// Longest lattice a single range item may expand to.
pub const MAX_RANGE_LEN: usize = 100_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, Vec<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut config = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Config { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(bad(format!("invalid key `{key}`")));
            }
            if config.entries.contains_key(key) {
                return Err(bad(format!("duplicate key `{key}`")));
            }
            let values = parse_list(value).map_err(|e| bad(e.to_string()))?;
            config.entries.insert(key.to_string(), values);
        }
        Ok(config)
    }

    /// Replace `key` with the list parsed from `raw` (flag override).
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let values = parse_list(raw).map_err(|e| CliError::Usage(format!("--{}: {e}", key.replace('_', "-"))))?;
        self.entries.insert(key.to_string(), values);
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!(
                "unknown key `{k}`; expected one of {}",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// All values of `key`, parsed. A missing key is an error.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let values = self
            .entries
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing key `{key}`")))?;
        values
            .iter()
            .map(|v| v.parse().map_err(|e| CliError::Usage(format!("{key}: {e}"))))
            .collect()
    }

    /// The single value of `key`, if present.
    pub fn scalar<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if !self.contains(key) {
            return Ok(None);
        }
        let mut values = self.list(key)?;
        if values.len() != 1 {
            return Err(CliError::Usage(format!(
                "{key}: expected a single value, got {}",
                values.len()
            )));
        }
        Ok(values.pop())
    }
}

/// Split `[a, b, c]` (or a bare item) into items, expanding ranges.
pub fn parse_list(raw: &str) -> std::result::Result<Vec<String>, String> {
    let raw = raw.trim();
    let body = match raw.strip_prefix('[') {
        Some(rest) => rest
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated list `{raw}`"))?,
        None if raw.contains(',') => return Err(format!("lists must be bracketed: `{raw}`")),
        None => raw,
    };
    if body.trim().is_empty() {
        return if raw.starts_with('[') {
            Ok(vec![])
        } else {
            Err("empty value".into())
        };
    }
    let mut out = Vec::new();
    for item in body.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(format!("empty item in `{raw}`"));
        }
        if item.contains("..") {
            out.extend(expand_range(item)?.iter().map(|r| r.to_string()));
        } else {
            out.push(item.to_string());
        }
    }
    Ok(out)
}

fn expand_range(item: &str) -> std::result::Result<Vec<Rational>, String> {
    let parse = |s: &str| s.trim().parse::<Rational>().map_err(|e| e.to_string());
    let (span, step) = item
        .split_once(':')
        .ok_or_else(|| format!("range `{item}` needs a step, as in `0..2:1/4`"))?;
    let (lo, hi) = span.split_once("..").ok_or_else(|| format!("bad range `{item}`"))?;
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if step <= Rational::ZERO {
        return Err(format!("range step must be positive in `{item}`"));
    }
    let mut out = Vec::new();
    let mut x = lo;
    while x <= hi {
        if out.len() == MAX_RANGE_LEN {
            return Err(format!("range `{item}` has more than {MAX_RANGE_LEN} points"));
        }
        out.push(x);
        x = x + step;
    }
    Ok(out)
}
