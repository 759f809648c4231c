//! Replicate-parallel Monte Carlo: critical values, sizes and powers.
//!
//! Replicate `r` of an experiment draws from its own Philox stream keyed by
//! `(seed, purpose, r)`, where `purpose` hashes the experiment label (kind of
//! run, sample size, model). Replicates are processed in fixed-size chunks
//! whose results are gathered in chunk order, so every output is identical
//! for any number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wgof_core::sample::fill_sorted_uniform;
use wgof_core::{AlternativeModel, LocalPath, Philox4x32, StatisticSpec};

use crate::error::{Error, Result};

const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Workers {
    Auto,
    Count(usize),
}

impl std::str::FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("workers must be a positive count or \"auto\", got {s:?}")),
            Ok(k) => Ok(Workers::Count(k)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub reps_critical: usize,
    pub reps_power: usize,
    pub alpha: f64,
    pub seed: u64,
    pub workers: Workers,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            reps_critical: 100_000,
            reps_power: 10_000,
            alpha: 0.01,
            seed: 20_190_301,
            workers: Workers::Auto,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps_critical == 0 || self.reps_power == 0 {
            return Err(Error::Config("replicate counts must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    /// Runs `f` inside a pool with the configured number of threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            Workers::Auto => Ok(f()),
            Workers::Count(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Stable 64-bit identifier of an experiment label.
pub fn purpose(label: &str) -> u64 {
    let d = Sha256::digest(label.as_bytes());
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Where replicate samples come from.
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    Null,
    Model(&'a AlternativeModel),
    Path(&'a LocalPath),
}

impl Source<'_> {
    fn fill(&self, out: &mut Vec<f64>, n: usize, rng: &mut Philox4x32) {
        match self {
            Source::Null => fill_sorted_uniform(out, n, rng),
            Source::Model(m) => m.fill_sample(out, n, rng),
            Source::Path(p) => p.fill_sample(out, n, rng),
        }
    }

    fn label(&self) -> String {
        match self {
            Source::Null => "null".into(),
            Source::Model(m) => format!("model {m}"),
            Source::Path(p) => format!("path {} theta={}", p.model(), p.theta()),
        }
    }
}

fn check_specs(specs: &[StatisticSpec], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("sample size must be at least 1".into()));
    }
    for s in specs {
        s.validate(n).map_err(|e| Error::Statistic {
            spec: s.to_string(),
            source: e,
        })?;
    }
    Ok(())
}

/// Statistic values of `reps` replicates, laid out replicate-major:
/// `out[r * specs.len() + j]` is spec `j` on replicate `r`.
pub fn simulate(
    specs: &[StatisticSpec],
    source: Source<'_>,
    n: usize,
    reps: usize,
    seed: u64,
    purpose: u64,
) -> Vec<f64> {
    let k = specs.len();
    let chunks = reps.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(reps);
            let mut buf = Vec::with_capacity(n);
            let mut vals = Vec::with_capacity((hi - lo) * k);
            for r in lo..hi {
                let mut rng = Philox4x32::for_replicate(seed, purpose, r as u64);
                source.fill(&mut buf, n, &mut rng);
                vals.extend(specs.iter().map(|s| s.evaluate_sorted(&buf)));
            }
            vals
        })
        .collect();
    parts.concat()
}

/// Per spec, the number of replicates with `T >= threshold[j]`.
pub fn count_exceedances(
    specs: &[StatisticSpec],
    thresholds: &[f64],
    source: Source<'_>,
    n: usize,
    reps: usize,
    seed: u64,
    purpose: u64,
) -> Vec<u64> {
    let k = specs.len();
    let chunks = reps.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(reps);
            let mut buf = Vec::with_capacity(n);
            let mut hits = vec![0u64; k];
            for r in lo..hi {
                let mut rng = Philox4x32::for_replicate(seed, purpose, r as u64);
                source.fill(&mut buf, n, &mut rng);
                for j in 0..k {
                    if rejects(specs[j].evaluate_sorted(&buf), thresholds[j]) {
                        hits[j] += 1;
                    }
                }
            }
            hits
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Rejection rule `T >= c`; an infinite critical value never rejects.
pub fn rejects(t: f64, c: f64) -> bool {
    c.is_finite() && t >= c
}

/// 1-based index `ceil((1 - alpha) reps)` of the critical order statistic.
pub fn quantile_index(reps: usize, alpha: f64) -> usize {
    // the guard keeps e.g. 0.99 * 1e5 from rounding up to 99001
    let k = ((1.0 - alpha) * reps as f64 - 1e-9).ceil() as usize;
    k.clamp(1, reps)
}

/// A Monte Carlo critical value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue {
    pub spec: StatisticSpec,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub value: f64,
    /// Half-width of the distribution-free order-statistic interval of
    /// one binomial standard deviation.
    pub stderr: f64,
}

fn critical_from_sorted(sorted: &[f64], alpha: f64) -> (f64, f64) {
    let reps = sorted.len();
    let k = quantile_index(reps, alpha) - 1;
    let d = ((reps as f64 * alpha * (1.0 - alpha)).sqrt().ceil() as usize).max(1);
    let hi = (k + d).min(reps - 1);
    let lo = k.saturating_sub(d);
    (sorted[k], (sorted[hi] - sorted[lo]) / 2.0)
}

fn critical_label(n: usize) -> String {
    format!("critical n={n}")
}

/// Critical values of several statistics at one `n`, all from the same
/// null replicates. Each value equals the one [`critical_value`] gives for
/// that spec alone.
pub fn critical_values(specs: &[StatisticSpec], n: usize, cfg: &McConfig) -> Result<Vec<CriticalValue>> {
    cfg.validate()?;
    check_specs(specs, n)?;
    let reps = cfg.reps_critical;
    let k = specs.len();
    let flat = cfg.install(|| simulate(specs, Source::Null, n, reps, cfg.seed, purpose(&critical_label(n))))?;
    let mut out = Vec::with_capacity(k);
    let mut column = Vec::with_capacity(reps);
    for (j, spec) in specs.iter().enumerate() {
        column.clear();
        column.extend(flat.iter().skip(j).step_by(k).copied());
        column.sort_unstable_by(f64::total_cmp);
        let (value, stderr) = critical_from_sorted(&column, cfg.alpha);
        out.push(CriticalValue {
            spec: *spec,
            n,
            alpha: cfg.alpha,
            reps,
            seed: cfg.seed,
            value,
            stderr,
        });
    }
    Ok(out)
}

pub fn critical_value(spec: StatisticSpec, n: usize, cfg: &McConfig) -> Result<CriticalValue> {
    Ok(critical_values(&[spec], n, cfg)?.remove(0))
}

/// A rejection frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub reps: usize,
}

impl Frequency {
    pub fn new(hits: u64, reps: usize) -> Self {
        let p = hits as f64 / reps as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / reps as f64).sqrt(),
            hits,
            reps,
        }
    }

    /// `sqrt(se_a^2 + se_b^2)`.
    pub fn joint_stderr(&self, other: &Frequency) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Rejection frequencies under the null on fresh replicates (`reps_critical`
/// of them, on streams independent of the calibration run).
pub fn empirical_sizes(crits: &[CriticalValue], n: usize, cfg: &McConfig) -> Result<Vec<Frequency>> {
    let specs: Vec<StatisticSpec> = crits.iter().map(|c| c.spec).collect();
    let thresholds: Vec<f64> = crits.iter().map(|c| c.value).collect();
    cfg.validate()?;
    check_specs(&specs, n)?;
    let reps = cfg.reps_critical;
    let p = purpose(&format!("validation n={n}"));
    let hits = cfg.install(|| count_exceedances(&specs, &thresholds, Source::Null, n, reps, cfg.seed, p))?;
    Ok(hits.into_iter().map(|h| Frequency::new(h, reps)).collect())
}

pub fn empirical_size(crit: &CriticalValue, cfg: &McConfig) -> Result<Frequency> {
    Ok(empirical_sizes(std::slice::from_ref(crit), crit.n, cfg)?.remove(0))
}

/// Rejection frequencies over `reps_power` samples from `source`, one per
/// critical value; all statistics see the same samples.
pub fn powers(crits: &[CriticalValue], source: Source<'_>, n: usize, cfg: &McConfig) -> Result<Vec<Frequency>> {
    cfg.validate()?;
    let specs: Vec<StatisticSpec> = crits.iter().map(|c| c.spec).collect();
    let thresholds: Vec<f64> = crits.iter().map(|c| c.value).collect();
    check_specs(&specs, n)?;
    if let Some(c) = crits.iter().find(|c| c.n != n) {
        return Err(Error::Config(format!(
            "critical value for {} was computed at n={}, not n={n}",
            c.spec, c.n
        )));
    }
    let reps = cfg.reps_power;
    let p = purpose(&format!("power n={n} {}", source.label()));
    let hits = cfg.install(|| count_exceedances(&specs, &thresholds, source, n, reps, cfg.seed, p))?;
    Ok(hits.into_iter().map(|h| Frequency::new(h, reps)).collect())
}

pub fn power(crit: &CriticalValue, model: &AlternativeModel, cfg: &McConfig) -> Result<Frequency> {
    Ok(powers(std::slice::from_ref(crit), Source::Model(model), crit.n, cfg)?.remove(0))
}

/// `n e` rounded half up.
pub fn corrected_n(n: usize, e: f64) -> Result<usize> {
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Config(format!(
            "efficiency must be positive and finite, got {e}"
        )));
    }
    let m = (n as f64 * e + 0.5).floor();
    if m < 1.0 {
        return Err(Error::Config(format!(
            "corrected sample size n*e = {} is below 1",
            n as f64 * e
        )));
    }
    Ok(m as usize)
}
