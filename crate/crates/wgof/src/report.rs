//! Efficiency tables.
//!
//! Besides the efficiencies, each row carries the coefficients of the
//! admissible levels along `theta_n = c n^-q`: for KS, BS(kappa), EJ and
//! AD_INT the level satisfies `-log alpha_n ~ coef c^2 n^(1-2q)`, with
//! `coef = c_T (b_T / (sqrt(n) theta_n))^2`; for AD_LOG the level is
//! logarithmic, `log alpha_n ~ (2q - 1) log n`, and has no coefficient.

use std::io::Write;

use serde::Serialize;
use wgof_core::efficiency::{index, weak_slope_heavy_tail, EfficiencyReport, ThetaRule, WeakSlope};
use wgof_core::{KappaRule, ShapeFunction};

use crate::error::{Error, Result};

pub const EFFICIENCY_SCHEMA: &str = "# wgof efficiency v1";

/// Sample sizes of the weak-slope check for shapes whose `A*` does not
/// vanish at the ends.
pub const WEAK_SLOPE_GRID: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, Serialize)]
pub struct LevelCoefficients {
    pub ks: f64,
    /// `(kappa, coef)` for each requested kappa.
    pub bs: Vec<(f64, f64)>,
    pub ej: Option<f64>,
    pub ad_int: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EfficiencyEntry {
    pub input: String,
    #[serde(flatten)]
    pub report: EfficiencyReport,
    /// Restricted sups along [`WEAK_SLOPE_GRID`] with `kappa_n = n^-0.9`,
    /// present when `A*` does not vanish at the ends.
    pub weak_slope: Option<WeakSlope>,
    pub level_coefficients: LevelCoefficients,
}

impl EfficiencyEntry {
    pub fn new(input: &str, shape: &ShapeFunction, kappas: &[f64]) -> Result<Self> {
        let report = EfficiencyReport::new(shape, kappas)?;
        let weak_slope = if report.conditions.astar_vanishes_at_endpoints {
            None
        } else {
            Some(weak_slope_heavy_tail(
                shape,
                KappaRule::NineTenths,
                ThetaRule {
                    scale: 1.0,
                    exponent: 0.4,
                },
                &WEAK_SLOPE_GRID,
            )?)
        };
        let level_coefficients = LevelCoefficients {
            ks: index::KS * report.sup_a * report.sup_a,
            bs: report
                .e_gk
                .iter()
                .map(|&(k, e)| (k, e * 4.0 * report.sup_a * report.sup_a * index::BS))
                .collect(),
            ej: report.flags.e_ek_defined.then_some(index::EJ * report.m0 * report.m0),
            ad_int: report
                .flags
                .e_ik_defined
                .then_some(index::AD_INT * report.l2_astar * report.l2_astar),
        };
        Ok(Self {
            input: input.to_string(),
            report,
            weak_slope,
            level_coefficients,
        })
    }

    /// The weak slope grows along the grid, i.e. the EJ efficiency is
    /// infinite in the weak sense.
    pub fn weak_slope_diverges(&self) -> bool {
        self.weak_slope.as_ref().is_some_and(|w| w.growing)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Efficiency CSV. The `e_ek` column holds `inf` when the weak slope
/// diverges and is empty when the efficiency is otherwise undefined.
pub fn write_efficiency_csv<W: Write>(mut out: W, entries: &[EfficiencyEntry], kappas: &[f64]) -> Result<()> {
    writeln!(out, "{EFFICIENCY_SCHEMA}").map_err(|e| Error::io("<efficiency csv>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "input", "shape", "t0", "m0", "sup_a", "l2_astar", "rho_a", "e_ek", "e_ik", "e_mk",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(kappas.iter().map(|k| format!("e_gk[{k}]")));
    header.extend(
        [
            "sup_astar_finite",
            "l2_astar_finite",
            "rho_converged",
            "astar_vanishes_at_endpoints",
            "tail_bound_exponents",
            "integrable",
            "integrability_exponents",
            "weak_slope_diverges",
            "level_coef_ks",
            "level_coef_ej",
            "level_coef_ad_int",
            "level_ad_log",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    header.extend(kappas.iter().map(|k| format!("level_coef_bs[{k}]")));
    header.push("warnings".into());
    w.write_record(&header)?;
    for e in entries {
        let r = &e.report;
        let c = &r.conditions;
        let e_ek = if e.weak_slope_diverges() {
            "inf".to_string()
        } else {
            opt(r.e_ek)
        };
        let mut rec = vec![
            e.input.clone(),
            r.shape.clone(),
            r.t0.to_string(),
            r.m0.to_string(),
            r.sup_a.to_string(),
            r.l2_astar.to_string(),
            r.rho_a.to_string(),
            e_ek,
            opt(r.e_ik),
            opt(r.e_mk),
        ];
        rec.extend(r.e_gk.iter().map(|(_, v)| v.to_string()));
        rec.extend([
            r.flags.sup_astar_finite.to_string(),
            r.flags.l2_astar_finite.to_string(),
            r.flags.rho_converged.to_string(),
            c.astar_vanishes_at_endpoints.to_string(),
            c.tail_bound_exponents.map(|x| x.to_string()).unwrap_or_default(),
            c.integrable.to_string(),
            c.integrability_exponents.map(|x| x.to_string()).unwrap_or_default(),
            e.weak_slope_diverges().to_string(),
            e.level_coefficients.ks.to_string(),
            opt(e.level_coefficients.ej),
            opt(e.level_coefficients.ad_int),
            if c.tail_bound_holds() {
                "log alpha_n ~ (2q-1) log n".to_string()
            } else {
                String::new()
            },
        ]);
        rec.extend(e.level_coefficients.bs.iter().map(|(_, v)| v.to_string()));
        rec.push(c.warnings.join("; "));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<efficiency csv>", e))?;
    Ok(())
}

pub fn write_efficiency_json<W: Write>(out: W, entries: &[EfficiencyEntry]) -> Result<()> {
    serde_json::to_writer_pretty(out, entries)?;
    Ok(())
}
