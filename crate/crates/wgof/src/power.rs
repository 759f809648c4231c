//! Power curves over sample-size and parameter grids, and the power of the
//! Kolmogorov-Smirnov test at an efficiency-corrected sample size.

use std::io::Write;

use serde::Serialize;
use wgof_core::{AlternativeModel, StatisticSpec};

use crate::cache::CriticalCache;
use crate::engine::{corrected_n, powers, Frequency, McConfig, Source};
use crate::error::{Error, Result};
use crate::parse::statistic_label;

pub const POWER_SCHEMA: &str = "# wgof power v1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub model: AlternativeModel,
    pub n: usize,
    pub critical_value: f64,
    pub power: Frequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub spec: StatisticSpec,
    pub alpha: f64,
    pub seed: u64,
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    /// Largest drop `p_i - p_j` (`i < j`) in units of the joint standard
    /// error; at most 0 for a nondecreasing curve.
    pub fn max_isotonic_violation(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                let se = a.power.joint_stderr(&b.power).max(f64::MIN_POSITIVE);
                worst = worst.max((a.power.estimate - b.power.estimate) / se);
            }
        }
        worst
    }

    pub fn powers(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.power.estimate).collect()
    }
}

/// Powers of several statistics along an `n` grid; at every `n` the
/// statistics share critical-value replicates and power replicates.
pub fn power_curves_vs_n(
    specs: &[StatisticSpec],
    model: &AlternativeModel,
    n_grid: &[usize],
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<Vec<PowerCurve>> {
    let mut curves: Vec<PowerCurve> = specs
        .iter()
        .map(|s| PowerCurve {
            spec: *s,
            alpha: cfg.alpha,
            seed: cfg.seed,
            points: Vec::with_capacity(n_grid.len()),
        })
        .collect();
    for &n in n_grid {
        let crits = cache.get_or_compute(specs, n, cfg)?;
        let pw = powers(&crits, Source::Model(model), n, cfg)?;
        for ((curve, cv), p) in curves.iter_mut().zip(&crits).zip(pw) {
            curve.points.push(PowerPoint {
                model: *model,
                n,
                critical_value: cv.value,
                power: p,
            });
        }
    }
    Ok(curves)
}

pub fn power_curve_vs_n(
    spec: StatisticSpec,
    model: &AlternativeModel,
    n_grid: &[usize],
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<PowerCurve> {
    Ok(power_curves_vs_n(&[spec], model, n_grid, cfg, cache)?.remove(0))
}

/// Powers at fixed `n` as parameter `param` of `base` runs over `values`.
pub fn power_curves_vs_param(
    specs: &[StatisticSpec],
    base: &AlternativeModel,
    param: &str,
    values: &[f64],
    n: usize,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<Vec<PowerCurve>> {
    let crits = cache.get_or_compute(specs, n, cfg)?;
    let mut curves: Vec<PowerCurve> = specs
        .iter()
        .map(|s| PowerCurve {
            spec: *s,
            alpha: cfg.alpha,
            seed: cfg.seed,
            points: Vec::with_capacity(values.len()),
        })
        .collect();
    for &v in values {
        let model = base.with_param(param, v)?;
        let pw = powers(&crits, Source::Model(&model), n, cfg)?;
        for ((curve, cv), p) in curves.iter_mut().zip(&crits).zip(pw) {
            curve.points.push(PowerPoint {
                model,
                n,
                critical_value: cv.value,
                power: p,
            });
        }
    }
    Ok(curves)
}

pub fn power_curve_vs_param(
    spec: StatisticSpec,
    base: &AlternativeModel,
    param: &str,
    values: &[f64],
    n: usize,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<PowerCurve> {
    Ok(power_curves_vs_param(&[spec], base, param, values, n, cfg, cache)?.remove(0))
}

/// Power of `K_m` at `m = n e` rounded half up, with its own critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedPower {
    pub n: usize,
    pub efficiency: f64,
    pub corrected_n: usize,
    pub power: Frequency,
}

pub fn corrected_sample_size_power(
    model: &AlternativeModel,
    n: usize,
    e: f64,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<CorrectedPower> {
    let m = corrected_n(n, e)?;
    let crit = cache.get_or_compute(&[StatisticSpec::Ks], m, cfg)?;
    let p = powers(&crit, Source::Model(model), m, cfg)?.remove(0);
    Ok(CorrectedPower {
        n,
        efficiency: e,
        corrected_n: m,
        power: p,
    })
}

/// Index of the first point with power at least `level`.
pub fn saturation_index(curve: &PowerCurve, level: f64) -> Option<usize> {
    curve.points.iter().position(|p| p.power.estimate >= level)
}

/// `count` integers from `lo` to `hi`, evenly spaced in `log n` and
/// deduplicated after rounding.
pub fn log_grid(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count <= 1 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Serialize)]
struct PowerRow<'a> {
    family: &'a str,
    params: String,
    statistic: String,
    n: usize,
    alpha: f64,
    power: f64,
    stderr: f64,
    seed: u64,
}

/// Power CSV: schema line, then
/// `family,params,statistic,n,alpha,power,stderr,seed`.
pub fn write_power_csv<W: Write>(mut out: W, curves: &[PowerCurve]) -> Result<()> {
    writeln!(out, "{POWER_SCHEMA}").map_err(|e| Error::io("<power csv>", e))?;
    let mut w = csv::Writer::from_writer(out);
    for c in curves {
        for p in &c.points {
            w.serialize(PowerRow {
                family: p.model.code(),
                params: p.model.params_string(),
                statistic: statistic_label(&c.spec),
                n: p.n,
                alpha: c.alpha,
                power: p.power.estimate,
                stderr: p.power.stderr,
                seed: c.seed,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io("<power csv>", e))?;
    Ok(())
}
