//! Monte Carlo estimates of moderate-deviation indices
//! `-log P0(T_n >= sqrt(n) w_n) / (n w_n^2)`, with the regime bookkeeping
//! that decides which limit the estimate should approach.
//!
//! Regimes are decided by exponent arithmetic on sequences of the form
//! `n^a (log n)^b (log log n)^c`, so "tends to 0", "tends to infinity" and
//! "stays bounded" are exact statements about the rule, not about the
//! finite grid.

use std::io::Write;

use serde::{Deserialize, Serialize};
use wgof_core::efficiency::index;
use wgof_core::{KappaRule, StatisticSpec};

use crate::engine::{count_exceedances, purpose, Frequency, McConfig, Source};
use crate::error::{Error, Result};
use crate::parse::statistic_label;

pub const PROBE_SCHEMA: &str = "# wgof probe v1";

/// Fewer hits than this make a tail estimate unreliable.
pub const MIN_HITS: f64 = 30.0;

/// The sequence `w_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WRule {
    /// `scale n^-exponent`.
    Power { scale: f64, exponent: f64 },
    /// `scale sqrt(log log n / n)`.
    RootLogLog { scale: f64 },
}

impl WRule {
    pub fn w(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            WRule::Power { scale, exponent } => scale * nf.powf(-exponent),
            WRule::RootLogLog { scale } => scale * (nf.ln().ln() / nf).sqrt(),
        }
    }

    pub fn order(&self) -> Order {
        match *self {
            WRule::Power { exponent, .. } => Order::power(-exponent),
            WRule::RootLogLog { .. } => Order {
                n: -0.5,
                log: 0.0,
                loglog: 0.5,
            },
        }
    }

    pub fn label(&self) -> String {
        match *self {
            WRule::Power { scale, exponent } => format!("power:{scale}:{exponent}"),
            WRule::RootLogLog { scale } => format!("root-loglog:{scale}"),
        }
    }
}

impl std::str::FromStr for WRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| Error::parse("w rule", s, format!("{x:?} is not a positive number")))
        };
        match parts.as_slice() {
            ["power", scale, exponent] => Ok(WRule::Power {
                scale: num(scale)?,
                exponent: num(exponent)?,
            }),
            ["root-loglog", scale] => Ok(WRule::RootLogLog { scale: num(scale)? }),
            _ => Err(Error::parse(
                "w rule",
                s,
                "expected power:<scale>:<exponent> or root-loglog:<scale>",
            )),
        }
    }
}

/// Growth order `n^n (log n)^log (log log n)^loglog`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    pub n: f64,
    pub log: f64,
    pub loglog: f64,
}

/// Limit of a sequence as `n -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Zero,
    Bounded,
    Infinity,
}

impl Order {
    pub fn power(a: f64) -> Self {
        Self {
            n: a,
            log: 0.0,
            loglog: 0.0,
        }
    }

    pub fn times(self, o: Order) -> Order {
        Order {
            n: self.n + o.n,
            log: self.log + o.log,
            loglog: self.loglog + o.loglog,
        }
    }

    pub fn pow(self, k: f64) -> Order {
        Order {
            n: self.n * k,
            log: self.log * k,
            loglog: self.loglog * k,
        }
    }

    pub fn limit(&self) -> Limit {
        const EPS: f64 = 1e-12;
        for e in [self.n, self.log, self.loglog] {
            if e > EPS {
                return Limit::Infinity;
            }
            if e < -EPS {
                return Limit::Zero;
            }
        }
        Limit::Bounded
    }
}

fn kappa_order(rule: KappaRule) -> Order {
    Order::power(-rule.decay_exponent())
}

/// One asymptotic condition and whether the rule meets it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub limit: Limit,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The index converges to a positive constant.
    NonDegenerate,
    /// The index converges to 0.
    Degenerate,
    /// The conditions of neither case are met.
    Ambiguous,
    /// `w_n -> 0` or `n w_n^2 -> infinity` fails.
    Outside,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::NonDegenerate => "non-degenerate",
            Regime::Degenerate => "degenerate",
            Regime::Ambiguous => "ambiguous",
            Regime::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub statistic: String,
    pub regime: Regime,
    /// Limit of the index in this regime, when determined.
    pub target_index: Option<f64>,
    pub conditions: Vec<Condition>,
    pub notes: Vec<String>,
}

fn cond(name: &str, order: Order, want: Limit) -> Condition {
    let limit = order.limit();
    Condition {
        name: name.into(),
        limit,
        holds: limit == want,
    }
}

/// Which limit of the index applies to `spec` along `w_rule`.
pub fn regime_check(spec: &StatisticSpec, w_rule: WRule) -> RegimeReport {
    let w = w_rule.order();
    let nw2 = Order::power(1.0).times(w.pow(2.0));
    let loglog_inv = Order {
        n: 0.0,
        log: 0.0,
        loglog: -1.0,
    };
    let log_inv = Order {
        n: 0.0,
        log: -1.0,
        loglog: 0.0,
    };
    let mut conditions = vec![
        cond("w_n -> 0", w, Limit::Zero),
        cond("n w_n^2 -> inf", nw2, Limit::Infinity),
    ];
    let mut notes = Vec::new();
    let base = conditions.iter().all(|c| c.holds);
    let (regime, target) = if !base {
        (Regime::Outside, None)
    } else {
        match *spec {
            StatisticSpec::Ks => (Regime::NonDegenerate, Some(index::KS)),
            StatisticSpec::Bs { .. } => (Regime::NonDegenerate, Some(index::BS)),
            StatisticSpec::AdSup => (Regime::Degenerate, Some(0.0)),
            StatisticSpec::AdInt => (Regime::NonDegenerate, Some(index::AD_INT)),
            StatisticSpec::AdLog => {
                let c = cond("n w_n^2 / log log n -> inf", nw2.times(loglog_inv), Limit::Infinity);
                let ok = c.holds;
                conditions.push(c);
                if ok {
                    (Regime::NonDegenerate, Some(index::AD_LOG))
                } else {
                    (Regime::Ambiguous, None)
                }
            }
            StatisticSpec::WeightedTau { tau } => {
                let big = cond("n w_n^2 / log n -> inf", nw2.times(log_inv), Limit::Infinity);
                let small = cond(
                    "w_n / sqrt(log n / n) -> 0",
                    w.times(Order {
                        n: 0.5,
                        log: -0.5,
                        loglog: 0.0,
                    }),
                    Limit::Zero,
                );
                let (b, s) = (big.holds, small.holds);
                conditions.push(big);
                conditions.push(small);
                if b {
                    (Regime::Degenerate, Some(0.0))
                } else if s {
                    (Regime::NonDegenerate, Some(index::weighted_tau(tau)))
                } else {
                    (Regime::Ambiguous, None)
                }
            }
            StatisticSpec::Ej { rule } => {
                let k = kappa_order(rule);
                let ratio = w.times(k.pow(-0.5));
                let n_kappa = cond("n kappa_n -> inf", Order::power(1.0).times(k), Limit::Infinity);
                let nk_log2 = Order::power(1.0).times(k).times(Order {
                    n: 0.0,
                    log: -2.0,
                    loglog: 0.0,
                });
                let nk_log2_limit = nk_log2.limit();
                let nk_ok = Condition {
                    name: "liminf n kappa_n / log^2 n > 0".into(),
                    limit: nk_log2_limit,
                    holds: nk_log2_limit != Limit::Zero,
                };
                let to_inf = cond("w_n / sqrt(kappa_n) -> inf", ratio, Limit::Infinity);
                let to_zero = cond("w_n / sqrt(kappa_n) -> 0", ratio, Limit::Zero);
                let ll = cond("n w_n^2 / log log n -> inf", nw2.times(loglog_inv), Limit::Infinity);
                let degenerate = n_kappa.holds && to_inf.holds;
                let non_degenerate = nk_ok.holds && to_zero.holds && ll.holds;
                if matches!(rule, KappaRule::Fixed(_)) {
                    notes.push("a fixed kappa does not tend to 0; the truncated statistic behaves like BS".into());
                }
                conditions.extend([n_kappa, nk_ok, to_inf, to_zero, ll]);
                if degenerate {
                    (Regime::Degenerate, Some(0.0))
                } else if non_degenerate {
                    (Regime::NonDegenerate, Some(index::EJ))
                } else {
                    (Regime::Ambiguous, None)
                }
            }
        }
    };
    if regime == Regime::Ambiguous {
        notes.push("the asymptotic conditions of neither case hold; the estimate has no stated limit".into());
    }
    RegimeReport {
        statistic: statistic_label(spec),
        regime,
        target_index: target,
        conditions,
        notes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub hits: u64,
    pub reps: usize,
    /// `p_hat reps >= 30`.
    pub reliable: bool,
}

/// Fraction of `reps` null replicates with `T >= threshold`.
pub fn tail_probability(
    spec: &StatisticSpec,
    n: usize,
    threshold: f64,
    reps: usize,
    seed: u64,
    cfg: &McConfig,
) -> Result<TailEstimate> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::Config(format!("threshold must be nonnegative, got {threshold}")));
    }
    if reps == 0 {
        return Err(Error::Config("replicate count must be at least 1".into()));
    }
    spec.validate(n).map_err(|e| Error::Statistic {
        spec: spec.to_string(),
        source: e,
    })?;
    let p = purpose(&format!("probe n={n}"));
    let hits = cfg.install(|| count_exceedances(&[*spec], &[threshold], Source::Null, n, reps, seed, p))?[0];
    let f = Frequency::new(hits, reps);
    Ok(TailEstimate {
        p_hat: f.estimate,
        stderr: f.stderr,
        hits,
        reps,
        reliable: hits as f64 >= MIN_HITS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub spec: StatisticSpec,
    pub w_rule: WRule,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl ProbeSpec {
    /// Checks the grid and that `w_n` decreases while `n w_n^2` increases
    /// along it.
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("n grid must be non-empty and strictly increasing".into()));
        }
        if self.n_grid[0] < 3 {
            return Err(Error::Config("n grid must start at 3 or above".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("replicate count must be at least 1".into()));
        }
        for w in self.n_grid.windows(2) {
            let (a, b) = (self.w_rule.w(w[0]), self.w_rule.w(w[1]));
            let decreasing = b < a;
            let growing = w[1] as f64 * b * b > w[0] as f64 * a * a;
            if !decreasing || !growing {
                return Err(Error::Config(format!(
                    "w rule {} does not have w_n decreasing and n w_n^2 increasing between n={} and n={}",
                    self.w_rule.label(),
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub statistic: String,
    pub n: usize,
    pub w_n: f64,
    pub threshold: f64,
    pub p_hat: f64,
    pub stderr: f64,
    /// `-log p_hat / (n w_n^2)`; `None` when no replicate exceeded the
    /// threshold.
    pub index_estimate: Option<f64>,
    pub target_index: Option<f64>,
    pub regime: Regime,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub rows: Vec<ProbeRow>,
    pub regime: RegimeReport,
    pub warnings: Vec<String>,
}

pub fn index_estimate(probe: &ProbeSpec, cfg: &McConfig) -> Result<ProbeResult> {
    Ok(index_estimates(std::slice::from_ref(probe), cfg)?.remove(0))
}

/// Runs several probes on shared null samples. All probes must use the same
/// `n_grid`, `reps` and `seed`; each gets its own thresholds.
pub fn index_estimates(probes: &[ProbeSpec], cfg: &McConfig) -> Result<Vec<ProbeResult>> {
    let Some(first) = probes.first() else {
        return Ok(Vec::new());
    };
    for p in probes {
        p.validate()?;
        if p.n_grid != first.n_grid || p.reps != first.reps || p.seed != first.seed {
            return Err(Error::Config(
                "batched probes must share n grid, replicate count and seed".into(),
            ));
        }
    }
    let specs: Vec<StatisticSpec> = probes.iter().map(|p| p.spec).collect();
    let mut out: Vec<ProbeResult> = probes
        .iter()
        .map(|p| ProbeResult {
            rows: Vec::with_capacity(p.n_grid.len()),
            regime: regime_check(&p.spec, p.w_rule),
            warnings: Vec::new(),
        })
        .collect();
    for &n in &first.n_grid {
        for s in &specs {
            s.validate(n).map_err(|e| Error::Statistic {
                spec: s.to_string(),
                source: e,
            })?;
        }
        let ws: Vec<f64> = probes.iter().map(|p| p.w_rule.w(n)).collect();
        let thresholds: Vec<f64> = ws.iter().map(|w| (n as f64).sqrt() * w).collect();
        let pur = purpose(&format!("probe n={n}"));
        let hits =
            cfg.install(|| count_exceedances(&specs, &thresholds, Source::Null, n, first.reps, first.seed, pur))?;
        for (i, res) in out.iter_mut().enumerate() {
            let (w, threshold) = (ws[i], thresholds[i]);
            let f = Frequency::new(hits[i], first.reps);
            let reliable = hits[i] as f64 >= MIN_HITS;
            if !reliable {
                res.warnings.push(format!(
                    "n={n}: only {} of {} replicates reach the threshold {threshold}; estimate unreliable",
                    hits[i], first.reps
                ));
            }
            res.rows.push(ProbeRow {
                statistic: statistic_label(&specs[i]),
                n,
                w_n: w,
                threshold,
                p_hat: f.estimate,
                stderr: f.stderr,
                index_estimate: (hits[i] > 0).then(|| -f.estimate.ln() / (n as f64 * w * w)),
                target_index: res.regime.target_index,
                regime: res.regime.regime,
                reliable,
            });
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    statistic: &'a str,
    n: usize,
    w_n: f64,
    threshold: f64,
    p_hat: f64,
    stderr: f64,
    index_estimate: Option<f64>,
    target_index: Option<f64>,
    regime: &'static str,
}

/// Probe CSV: schema line, then
/// `statistic,n,w_n,threshold,p_hat,stderr,index_estimate,target_index,regime`.
pub fn write_probe_csv<W: Write>(mut out: W, rows: &[ProbeRow]) -> Result<()> {
    writeln!(out, "{PROBE_SCHEMA}").map_err(|e| Error::io("<probe csv>", e))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            statistic: &r.statistic,
            n: r.n,
            w_n: r.w_n,
            threshold: r.threshold,
            p_hat: r.p_hat,
            stderr: r.stderr,
            index_estimate: r.index_estimate,
            target_index: r.target_index,
            regime: r.regime.as_str(),
        })?;
    }
    w.flush().map_err(|e| Error::io("<probe csv>", e))?;
    Ok(())
}
