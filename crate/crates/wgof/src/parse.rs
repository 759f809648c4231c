//! Text forms of statistics, models and shapes used by the CLI and the
//! CSV files.
//!
//! Statistics: `ks`, `bs:<kappa>`, `ej:<rule>`, `ad_sup`, `ad_log`,
//! `weighted_tau:<tau>`, `ad_int`, with the short aliases `k`, `g`, `e`, `s`,
//! `m`, `c`, `i` and the two named truncations `eo` (`ej:half-root`) and
//! `estar` (`ej:nine-tenths`). A rule is `half-root`, `nine-tenths`,
//! `power:<scale>:<exponent>` or `fixed:<kappa>`.
//!
//! Models: a family code `m1`..`m7` (or its name) followed by every
//! parameter as `name=value`, e.g. `m3 p=0.05 mu=2.0`.
//!
//! Shapes: a model, `tt` for `t(1-t)`, or `table:<path>`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use wgof_core::models::Point;
use wgof_core::{AlternativeModel, KappaRule, ShapeFunction, StatisticSpec};

use crate::error::{Error, Result};

fn number(what: &'static str, input: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(what, input, format!("{s:?} is not a finite number")))
}

pub fn parse_kappa_rule(s: &str) -> Result<KappaRule> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let rule = match parts.as_slice() {
        ["half-root"] => KappaRule::HalfRootN,
        ["nine-tenths"] => KappaRule::NineTenths,
        ["power", scale, exponent] => KappaRule::Power {
            scale: number("kappa rule", s, scale)?,
            exponent: number("kappa rule", s, exponent)?,
        },
        ["fixed", k] => KappaRule::Fixed(number("kappa rule", s, k)?),
        _ => {
            return Err(Error::parse(
                "kappa rule",
                s,
                "expected half-root, nine-tenths, power:<scale>:<exponent> or fixed:<kappa>",
            ))
        }
    };
    Ok(rule)
}

pub fn parse_statistic(s: &str) -> Result<StatisticSpec> {
    let t = s.trim().to_ascii_lowercase();
    let (name, arg) = match t.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (t.as_str(), None),
    };
    let need = || arg.ok_or_else(|| Error::parse("statistic", s, format!("{name} needs a parameter")));
    let none = |spec: StatisticSpec| match arg {
        None => Ok(spec),
        Some(_) => Err(Error::parse("statistic", s, format!("{name} takes no parameter"))),
    };
    let spec = match name {
        "ks" | "k" => none(StatisticSpec::Ks)?,
        "ad_sup" | "s" => none(StatisticSpec::AdSup)?,
        "ad_log" | "m" => none(StatisticSpec::AdLog)?,
        "ad_int" | "i" => none(StatisticSpec::AdInt)?,
        "eo" => none(StatisticSpec::Ej {
            rule: KappaRule::HalfRootN,
        })?,
        "estar" => none(StatisticSpec::Ej {
            rule: KappaRule::NineTenths,
        })?,
        "bs" | "g" => StatisticSpec::Bs {
            kappa: number("statistic", s, need()?)?,
        },
        "weighted_tau" | "c" => StatisticSpec::WeightedTau {
            tau: number("statistic", s, need()?)?,
        },
        "ej" | "e" => StatisticSpec::Ej {
            rule: parse_kappa_rule(need()?)?,
        },
        _ => return Err(Error::parse("statistic", s, "unknown statistic")),
    };
    // parameter ranges only; EJ rules are checked per n
    if !matches!(spec, StatisticSpec::Ej { .. }) {
        spec.validate(1)
            .map_err(|e| Error::parse("statistic", s, e.to_string()))?;
    }
    Ok(spec)
}

/// Canonical text form, accepted by [`parse_statistic`].
pub fn statistic_label(spec: &StatisticSpec) -> String {
    match *spec {
        StatisticSpec::Ks => "ks".into(),
        StatisticSpec::Bs { kappa } => format!("bs:{kappa}"),
        StatisticSpec::Ej { rule } => format!("ej:{}", rule.label()),
        StatisticSpec::AdSup => "ad_sup".into(),
        StatisticSpec::AdLog => "ad_log".into(),
        StatisticSpec::WeightedTau { tau } => format!("weighted_tau:{tau}"),
        StatisticSpec::AdInt => "ad_int".into(),
    }
}

pub fn parse_model(s: &str) -> Result<AlternativeModel> {
    let cleaned = s.replace(',', " ");
    let mut words = cleaned.split_whitespace();
    let family = words
        .next()
        .ok_or_else(|| Error::parse("model", s, "empty model"))?
        .to_ascii_lowercase();
    let mut params = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::parse("model", s, format!("expected name=value, got {w:?}")))?;
        if params.insert(k.to_ascii_lowercase(), number("model", s, v)?).is_some() {
            return Err(Error::parse("model", s, format!("parameter {k} given twice")));
        }
    }
    let mut take = |name: &str| {
        params
            .remove(name)
            .ok_or_else(|| Error::parse("model", s, format!("missing parameter {name}")))
    };
    let model = match family.as_str() {
        "m1" | "shift" => AlternativeModel::Shift { mu: take("mu")? },
        "m2" | "scale" => AlternativeModel::Scale { sigma: take("sigma")? },
        "m3" | "contaminated" => AlternativeModel::Contaminated {
            p: take("p")?,
            mu: take("mu")?,
        },
        "m4" | "tail_mass" => AlternativeModel::TailMass {
            beta: take("beta")?,
            pi: take("pi")?,
        },
        "m5" | "lehmann" => AlternativeModel::Lehmann {
            delta: take("delta")?,
            p: take("p")?,
        },
        "m6" | "subbotin" => AlternativeModel::Subbotin {
            gamma: take("gamma")?,
            p: take("p")?,
        },
        "m7" | "pareto" => AlternativeModel::Pareto {
            zeta: take("zeta")?,
            p: take("p")?,
        },
        _ => return Err(Error::parse("model", s, "unknown family")),
    };
    if let Some(k) = params.keys().next() {
        return Err(Error::parse("model", s, format!("unknown parameter {k}")));
    }
    model.validate().map_err(|e| Error::parse("model", s, e.to_string()))
}

/// A shape from its text form; models are normalized, `tt` and tables are
/// used as given.
pub fn parse_shape(s: &str) -> Result<ShapeFunction> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("tt") {
        return Ok(ShapeFunction::parabola());
    }
    if let Some(path) = t.strip_prefix("table:") {
        return load_table_shape(Path::new(path));
    }
    let model = parse_model(t)?;
    ShapeFunction::from_model(&model).map_err(|e| Error::parse("shape", s, e.to_string()))
}

/// Reads `t A(t)` pairs (whitespace or comma separated, `#` comments) and
/// interpolates linearly, with `A(0) = A(1) = 0` appended.
pub fn load_table_shape(path: &Path) -> Result<ShapeFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pts = vec![(0.0, 0.0)];
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Input {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let cols: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .collect();
        let [a, b] = cols.as_slice() else {
            return Err(bad(format!("expected two columns, got {}", cols.len())));
        };
        let t: f64 = a.parse().map_err(|_| bad(format!("bad number {a:?}")))?;
        let v: f64 = b.parse().map_err(|_| bad(format!("bad number {b:?}")))?;
        if !(t > 0.0 && t < 1.0) || !v.is_finite() {
            return Err(bad("t must lie in (0, 1) and A(t) be finite".into()));
        }
        if t <= pts.last().expect("non-empty").0 {
            return Err(bad("t values must increase".into()));
        }
        pts.push((t, v));
    }
    if pts.len() < 2 {
        return Err(Error::Input {
            path: path.to_path_buf(),
            line: 0,
            reason: "table has no points".into(),
        });
    }
    pts.push((1.0, 0.0));
    let table = Arc::new(pts);
    let name = format!("table:{}", path.display());
    Ok(ShapeFunction::custom(
        name,
        move |p: Point| interpolate(&table, p.t),
        None,
    ))
}

fn interpolate(pts: &[(f64, f64)], t: f64) -> f64 {
    let i = pts.partition_point(|&(x, _)| x <= t);
    if i == 0 {
        return pts[0].1;
    }
    if i == pts.len() {
        return pts[pts.len() - 1].1;
    }
    let (x0, y0) = pts[i - 1];
    let (x1, y1) = pts[i];
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

/// Comma-separated list of reals.
pub fn parse_list(what: &'static str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| number(what, s, x)).collect()
}

/// Comma-separated list of counts.
pub fn parse_counts(what: &'static str, s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::parse(what, s, format!("{x:?} is not a positive count")))
        })
        .collect()
}
