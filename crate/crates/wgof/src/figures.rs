//! Data behind the power figures, as long-format CSV with columns
//! `series,x,y,stderr`.
//!
//! Series names are `/`-separated: `a/<model>` and `astar/<model>` for the
//! shape curves, `t0m0/<model>` for the location and size of `sup |A*|`,
//! `power/<statistic>/<model>` for power against `n`, `zoom/...` for the
//! same curves cut at the first `n` where EJ with `kappa_n = n^-1/2 / 2`
//! reaches power 0.99, and `zoom/ks@n*e_ek/<model>`, `zoom/ks@n*e_ik/<model>`
//! for KS at the efficiency-corrected sample sizes. Parameter sweeps use
//! `power/<statistic>/<model> sweep <param>` with the parameter as `x`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use wgof_core::efficiency::{e_ek, e_ik};
use wgof_core::models::Point;
use wgof_core::{AlternativeModel, KappaRule, ShapeFunction, StatisticSpec};

use crate::cache::CriticalCache;
use crate::engine::{powers, McConfig, Source};
use crate::error::{Error, Result};
use crate::parse::statistic_label;
use crate::power::{
    corrected_sample_size_power, log_grid, power_curves_vs_n, power_curves_vs_param, saturation_index, write_power_csv,
    PowerCurve,
};
use crate::report::{write_efficiency_csv, EfficiencyEntry};

pub const FIGURE_SCHEMA: &str = "# wgof figure v1";

/// Points of the shape curves.
pub const SHAPE_GRID: usize = 2001;

/// Power at which the zoomed panels stop.
pub const ZOOM_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(Error::parse("figure", s, "expected fig1, fig2 or fig3")),
        }
    }
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    /// Models of the power-against-`n` figures.
    pub fn models(&self) -> Vec<AlternativeModel> {
        match self {
            Figure::Fig1 => vec![
                AlternativeModel::Shift { mu: 0.15 },
                AlternativeModel::Scale { sigma: 0.75 },
            ],
            Figure::Fig2 => vec![
                AlternativeModel::Scale { sigma: 1.25 },
                AlternativeModel::Contaminated { p: 0.05, mu: 2.0 },
            ],
            Figure::Fig3 => Vec::new(),
        }
    }
}

/// The five statistics of the figures: EJ with both truncations, AD_INT,
/// AD_LOG and KS.
pub fn figure_statistics() -> [StatisticSpec; 5] {
    [
        StatisticSpec::Ej {
            rule: KappaRule::HalfRootN,
        },
        StatisticSpec::Ej {
            rule: KappaRule::NineTenths,
        },
        StatisticSpec::AdInt,
        StatisticSpec::AdLog,
        StatisticSpec::Ks,
    ]
}

/// A parameter sweep of the heavy-tail figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub base: AlternativeModel,
    pub param: String,
    pub lo: f64,
    pub hi: f64,
}

impl Sweep {
    pub fn values(&self, points: usize) -> Vec<f64> {
        if points <= 1 {
            return vec![self.lo];
        }
        (0..points)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (points - 1) as f64)
            .collect()
    }
}

/// Default sweeps over `pi`, `beta`, `delta`, `gamma` and `zeta` with mixing
/// weight (or tail width) `p`.
pub fn default_sweeps(p: f64) -> Vec<Sweep> {
    let s = |base, param: &str, lo, hi| Sweep {
        base,
        param: param.into(),
        lo,
        hi,
    };
    vec![
        s(AlternativeModel::TailMass { beta: 4.0, pi: p }, "pi", 0.01, 0.2),
        s(AlternativeModel::TailMass { beta: 4.0, pi: p }, "beta", 2.0, 8.0),
        s(AlternativeModel::Lehmann { delta: 0.3, p }, "delta", 0.05, 0.5),
        s(AlternativeModel::Subbotin { gamma: 1.0, p }, "gamma", 0.2, 1.8),
        s(AlternativeModel::Pareto { zeta: 2.0, p }, "zeta", 0.5, 4.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Explicit `n` grid; otherwise `steps` log-spaced sizes from `n_min`
    /// to the saturation point of EJ with `kappa_n = n^-1/2 / 2`.
    pub n_grid: Option<Vec<usize>>,
    pub n_min: usize,
    pub steps: usize,
    /// Upper limit of the saturation search.
    pub n_cap: usize,
    pub sweep_n: usize,
    pub sweep_p: f64,
    pub sweep_points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            n_grid: None,
            n_min: 100,
            steps: 20,
            n_cap: 100_000,
            sweep_n: 1000,
            sweep_p: 0.1,
            sweep_points: 25,
        }
    }
}

/// Output files of a figure, as (file name, contents), plus notes for the
/// manifest.
#[derive(Debug, Clone, Default)]
pub struct FigureBundle {
    pub files: Vec<(String, Vec<u8>)>,
    pub notes: Vec<String>,
}

struct LongWriter {
    w: csv::Writer<Vec<u8>>,
}

impl LongWriter {
    fn new() -> Result<Self> {
        let mut buf = Vec::new();
        writeln!(buf, "{FIGURE_SCHEMA}").expect("write to Vec");
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["series", "x", "y", "stderr"])?;
        Ok(Self { w })
    }

    fn row(&mut self, series: &str, x: f64, y: f64, stderr: Option<f64>) -> Result<()> {
        let se = stderr.map(|s| s.to_string()).unwrap_or_default();
        self.w.write_record([series, &x.to_string(), &y.to_string(), &se])?;
        Ok(())
    }

    fn curve(&mut self, prefix: &str, c: &PowerCurve, tail: &str, x_of: impl Fn(usize) -> f64) -> Result<()> {
        let name = format!("{prefix}/{}/{tail}", statistic_label(&c.spec));
        for (i, p) in c.points.iter().enumerate() {
            self.row(&name, x_of(i), p.power.estimate, Some(p.power.stderr))?;
        }
        Ok(())
    }

    fn finish(self) -> Result<Vec<u8>> {
        self.w.into_inner().map_err(|e| Error::Config(e.to_string()))
    }
}

fn shape_series(out: &mut LongWriter, model: &AlternativeModel, entry: &EfficiencyEntry) -> Result<()> {
    let shape = ShapeFunction::from_model(model)?;
    let name = model.to_string();
    for k in 0..SHAPE_GRID {
        let t = (k as f64 + 0.5) / SHAPE_GRID as f64;
        let p = Point::new(t);
        if let Some(a) = shape.density(p) {
            out.row(&format!("a/{name}"), t, a, None)?;
        }
    }
    for k in 0..SHAPE_GRID {
        let t = (k as f64 + 0.5) / SHAPE_GRID as f64;
        out.row(&format!("astar/{name}"), t, shape.star(Point::new(t)), None)?;
    }
    out.row(&format!("t0m0/{name}"), entry.report.t0, entry.report.m0, None)?;
    Ok(())
}

/// Doubles `n` from `n_min` until the EJ test with `kappa_n = n^-1/2 / 2`
/// reaches [`ZOOM_LEVEL`] or `n_cap` is passed.
pub fn saturation_n(
    model: &AlternativeModel,
    opts: &FigureOptions,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<usize> {
    let eo = StatisticSpec::Ej {
        rule: KappaRule::HalfRootN,
    };
    let mut n = opts.n_min;
    loop {
        let crit = cache.get_or_compute(&[eo], n, cfg)?;
        let p = powers(&crit, Source::Model(model), n, cfg)?[0];
        if p.estimate >= ZOOM_LEVEL || n >= opts.n_cap {
            return Ok(n);
        }
        n = (2 * n).min(opts.n_cap);
    }
}

fn power_figure(
    which: Figure,
    opts: &FigureOptions,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<FigureBundle> {
    let specs = figure_statistics();
    let mut long = LongWriter::new()?;
    let mut all_curves = Vec::new();
    let mut entries = Vec::new();
    let mut notes = Vec::new();
    for model in which.models() {
        let shape = ShapeFunction::from_model(&model)?;
        let entry = EfficiencyEntry::new(&model.to_string(), &shape, &[])?;
        shape_series(&mut long, &model, &entry)?;
        let grid = match &opts.n_grid {
            Some(g) => g.clone(),
            None => {
                let sat = saturation_n(&model, opts, cfg, cache)?;
                notes.push(format!("{model}: n grid ends at the saturation search result n={sat}"));
                log_grid(opts.n_min, sat, opts.steps)
            }
        };
        let curves = power_curves_vs_n(&specs, &model, &grid, cfg, cache)?;
        let name = model.to_string();
        for c in &curves {
            long.curve("power", c, &name, |i| grid[i] as f64)?;
        }
        let cut = saturation_index(&curves[0], ZOOM_LEVEL).map_or(grid.len(), |i| i + 1);
        if cut == grid.len() && saturation_index(&curves[0], ZOOM_LEVEL).is_none() {
            notes.push(format!(
                "{model}: EJ power stays below {ZOOM_LEVEL} on the grid; zoom shows the full grid"
            ));
        }
        for c in &curves {
            let mut z = c.clone();
            z.points.truncate(cut);
            long.curve("zoom", &z, &name, |i| grid[i] as f64)?;
        }
        for (label, e) in [("ks@n*e_ek", e_ek(&shape)), ("ks@n*e_ik", e_ik(&shape))] {
            let e = match e {
                Ok(e) => e,
                Err(err) => {
                    notes.push(format!("{model}: no {label} series: {err}"));
                    continue;
                }
            };
            let series = format!("zoom/{label}/{name}");
            for &n in &grid[..cut] {
                let cp = corrected_sample_size_power(&model, n, e, cfg, cache)?;
                long.row(&series, n as f64, cp.power.estimate, Some(cp.power.stderr))?;
            }
        }
        all_curves.extend(curves);
        entries.push(entry);
    }
    let mut power_csv = Vec::new();
    write_power_csv(&mut power_csv, &all_curves)?;
    let mut eff_csv = Vec::new();
    write_efficiency_csv(&mut eff_csv, &entries, &[])?;
    Ok(FigureBundle {
        files: vec![
            (format!("{}.csv", which.name()), long.finish()?),
            (format!("{}_power.csv", which.name()), power_csv),
            (format!("{}_efficiency.csv", which.name()), eff_csv),
        ],
        notes,
    })
}

fn sweep_figure(opts: &FigureOptions, cfg: &McConfig, cache: &mut CriticalCache) -> Result<FigureBundle> {
    let specs = figure_statistics();
    let mut long = LongWriter::new()?;
    let mut all_curves = Vec::new();
    let mut notes = vec![
        "corrected-KS series are not produced: these models violate the vanishing condition on A*, so e_EK is undefined"
            .to_string(),
    ];
    for sweep in default_sweeps(opts.sweep_p) {
        let values = sweep.values(opts.sweep_points);
        let curves = power_curves_vs_param(&specs, &sweep.base, &sweep.param, &values, opts.sweep_n, cfg, cache)?;
        let tail = format!("{} sweep {}", sweep.base, sweep.param);
        for c in &curves {
            long.curve("power", c, &tail, |i| values[i])?;
        }
        all_curves.extend(curves);
    }
    notes.push(format!("sweeps at n={} with p={}", opts.sweep_n, opts.sweep_p));
    let mut power_csv = Vec::new();
    write_power_csv(&mut power_csv, &all_curves)?;
    Ok(FigureBundle {
        files: vec![
            ("fig3.csv".to_string(), long.finish()?),
            ("fig3_power.csv".to_string(), power_csv),
        ],
        notes,
    })
}

pub fn figure_bundle(
    which: Figure,
    opts: &FigureOptions,
    cfg: &McConfig,
    cache: &mut CriticalCache,
) -> Result<FigureBundle> {
    cfg.validate()?;
    match which {
        Figure::Fig3 => sweep_figure(opts, cfg, cache),
        _ => power_figure(which, opts, cfg, cache),
    }
}
