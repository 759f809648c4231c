//! Data ingestion: one value per line, `#` starts a comment, blank lines are
//! skipped. Values are mapped to (0, 1) through the null distribution
//! function before testing.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wgof_core::special::norm_cdf;
use wgof_core::NullSample;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NullDist {
    /// Data already on (0, 1).
    Uniform,
    Gaussian {
        mu: f64,
        sigma: f64,
    },
}

impl NullDist {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            NullDist::Uniform => x,
            NullDist::Gaussian { mu, sigma } => norm_cdf((x - mu) / sigma),
        }
    }
}

impl std::str::FromStr for NullDist {
    type Err = Error;

    /// `uniform`, `gaussian` (standard) or `gaussian(mu,sigma)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "uniform" {
            return Ok(NullDist::Uniform);
        }
        if t == "gaussian" {
            return Ok(NullDist::Gaussian { mu: 0.0, sigma: 1.0 });
        }
        let args = t
            .strip_prefix("gaussian(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::parse("null", s, "expected uniform, gaussian or gaussian(mu,sigma)"))?;
        let parts: Vec<f64> = args
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse("null", s, e.to_string()))?;
        match parts.as_slice() {
            [mu, sigma] if mu.is_finite() && sigma.is_finite() && *sigma > 0.0 => {
                Ok(NullDist::Gaussian { mu: *mu, sigma: *sigma })
            }
            _ => Err(Error::parse("null", s, "need finite mu and positive sigma")),
        }
    }
}

/// Parsed values with their 1-based line numbers.
pub fn parse_values(text: &str, path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().map_err(|_| Error::Input {
            path: path.to_path_buf(),
            line: i + 1,
            reason: format!("not a number: {body:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Input {
                path: path.to_path_buf(),
                line: i + 1,
                reason: "value is not finite".into(),
            });
        }
        out.push((i + 1, v));
    }
    Ok(out)
}

pub fn read_values(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_values(&text, path)
}

/// Applies the null distribution function and sorts. Values that land on or
/// outside the ends of (0, 1) are rejected with their line number.
pub fn to_unit_sample(values: &[(usize, f64)], null: NullDist, path: &Path) -> Result<NullSample> {
    if values.is_empty() {
        return Err(wgof_core::Error::EmptySample.into());
    }
    let mut u = Vec::with_capacity(values.len());
    for &(line, x) in values {
        let t = null.cdf(x);
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Input {
                path: path.to_path_buf(),
                line,
                reason: format!("value {x} maps to {t}, outside (0, 1) under the null"),
            });
        }
        u.push(t);
    }
    Ok(NullSample::new(u)?)
}

pub fn load_sample(path: &Path, null: NullDist) -> Result<NullSample> {
    to_unit_sample(&read_values(path)?, null, path)
}
