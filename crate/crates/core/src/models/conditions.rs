//! Tail conditions on a shape `A`, which decide which efficiency results
//! apply:
//!
//! * vanishing: `A*(t) -> 0` at both ends of (0, 1);
//! * tail bound: `sup |A(t)| / [t(1-t)]^(1 - w) < inf` for some `w` in
//!   `[0, 1/2)` (a range of admissible `w` is reported);
//! * integrability: `integral of |A|^(2l) / (t(1-t)) < inf` for some `l` in
//!   `(0, 1/2)` (a range of admissible `l` is reported).
//!
//! For the seven model families the answer is known in closed form from the
//! tail behaviour of `H` and is taken from a catalog. A numerical decay
//! diagnostic is computed alongside; where the two disagree the catalog wins
//! and a warning is attached.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::shape::{Point, ShapeFunction};
use super::AlternativeModel;

/// An interval of exponents with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentRange {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl ExponentRange {
    /// `[lo, 1/2)`.
    pub fn from_closed(lo: f64) -> Self {
        Self {
            lo,
            lo_closed: true,
            hi: 0.5,
            hi_closed: false,
        }
    }

    /// `(lo, 1/2)`.
    pub fn from_open(lo: f64) -> Self {
        Self {
            lo,
            lo_closed: false,
            hi: 0.5,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

impl fmt::Display for ExponentRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Numerical trend of `|A*|` approaching one end of (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EndpointTrend {
    Decaying,
    Growing,
    Inconclusive,
}

/// Which tail conditions a shape satisfies.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionReport {
    /// `A*(t) -> 0` at both ends.
    pub astar_vanishes_at_endpoints: bool,
    /// Admissible exponents `w` of the tail bound; `None` if there are none.
    pub tail_bound_exponents: Option<ExponentRange>,
    /// `integral of |A|^(2l) / (t(1-t))` is finite for some `l`.
    pub integrable: bool,
    /// Admissible `l`, when known.
    pub integrability_exponents: Option<ExponentRange>,
    /// True when the booleans come from the closed-form catalog.
    pub from_catalog: bool,
    pub lower_trend: EndpointTrend,
    pub upper_trend: EndpointTrend,
    pub warnings: Vec<String>,
}

impl ConditionReport {
    pub fn tail_bound_holds(&self) -> bool {
        self.tail_bound_exponents.is_some()
    }
}

struct Catalog {
    vanishes: bool,
    tail_bound: Option<ExponentRange>,
    integrability: Option<ExponentRange>,
}

fn catalog(m: &AlternativeModel) -> Catalog {
    let all_l = Some(ExponentRange::from_open(0.0));
    let (vanishes, tail_bound, integrability) = match *m {
        // 1 - H grows like exp(mu sqrt(2 log 1/q)) relative to q: slower than
        // any power, but unbounded
        AlternativeModel::Shift { .. } | AlternativeModel::Contaminated { .. } => {
            (true, Some(ExponentRange::from_open(0.0)), all_l)
        }
        // H behaves like t^(1/sigma^2) up to a vanishing power of log(1/t)
        AlternativeModel::Scale { sigma } => {
            let s2 = sigma * sigma;
            if sigma < 1.0 {
                (true, Some(ExponentRange::from_closed(0.0)), all_l)
            } else if (s2 - 2.0).abs() <= 1e-12 {
                // sigma = sqrt(2) as entered, up to rounding of the square
                (true, None, all_l)
            } else if s2 < 2.0 {
                (true, Some(ExponentRange::from_closed(1.0 - 1.0 / s2)), all_l)
            } else {
                (false, None, all_l)
            }
        }
        // H = c t^(1/beta) near 0
        AlternativeModel::TailMass { beta, .. } => {
            if beta < 1.0 {
                (true, Some(ExponentRange::from_closed(0.0)), all_l)
            } else if beta < 2.0 {
                (true, Some(ExponentRange::from_closed(1.0 - 1.0 / beta)), all_l)
            } else {
                (false, None, all_l)
            }
        }
        // H = (1-p) t + p t^delta near 0; regular at 1
        AlternativeModel::Lehmann { delta, .. } => {
            if delta > 1.0 {
                (true, Some(ExponentRange::from_closed(0.0)), all_l)
            } else if delta > 0.5 {
                (true, Some(ExponentRange::from_closed(1.0 - delta)), all_l)
            } else {
                (false, None, all_l)
            }
        }
        // Subbotin tails exp(-|x|^gamma/gamma) are lighter than normal for
        // gamma > 2 and heavier than any power of t for gamma < 2
        AlternativeModel::Subbotin { gamma, .. } => {
            if gamma > 2.0 {
                (true, Some(ExponentRange::from_closed(0.0)), all_l)
            } else {
                (false, None, all_l)
            }
        }
        // |A| ~ (2 log 1/t)^(-zeta/2) / 2, so |A|^(2l)/t is integrable iff
        // zeta l > 1
        AlternativeModel::Pareto { zeta, .. } => {
            if zeta > 2.0 {
                (false, None, Some(ExponentRange::from_open(1.0 / zeta)))
            } else {
                (false, None, None)
            }
        }
    };
    Catalog {
        vanishes,
        tail_bound,
        integrability,
    }
}

/// `|A*|` at `t = 10^-k`, `k = 4..=14`, approaching one end.
fn endpoint_profile(shape: &ShapeFunction, upper: bool) -> Vec<f64> {
    (4..=14)
        .map(|k| {
            let s = libm::pow(10.0, -(k as f64));
            let p = if upper {
                Point::from_complement(s)
            } else {
                Point::new(s)
            };
            shape.star(p).abs()
        })
        .collect()
}

fn trend(profile: &[f64]) -> EndpointTrend {
    // judge the deepest six decades
    let tail = &profile[profile.len() - 6..];
    let peak = profile.iter().cloned().fold(0.0, f64::max);
    let last = tail[tail.len() - 1];
    let shrinking = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    if last == 0.0 || (shrinking && last < 0.5 * peak) {
        EndpointTrend::Decaying
    } else if tail.windows(2).all(|w| w[1] >= w[0]) {
        EndpointTrend::Growing
    } else {
        EndpointTrend::Inconclusive
    }
}

/// Condition report for a model.
pub fn condition_report(model: &AlternativeModel) -> crate::error::Result<ConditionReport> {
    let shape = ShapeFunction::from_model(model)?;
    Ok(shape_conditions(&shape))
}

/// Condition report for any shape: catalog for model shapes, numerical
/// diagnostics only for custom shapes.
pub fn shape_conditions(shape: &ShapeFunction) -> ConditionReport {
    let lower_trend = trend(&endpoint_profile(shape, false));
    let upper_trend = trend(&endpoint_profile(shape, true));
    let numeric_vanishes = lower_trend == EndpointTrend::Decaying && upper_trend == EndpointTrend::Decaying;
    let mut warnings = Vec::new();
    match shape.model() {
        Some(m) => {
            let c = catalog(m);
            if c.vanishes != numeric_vanishes {
                warnings.push(alloc::format!(
                    "endpoint decay of |A*| looks {} numerically (lower: {:?}, upper: {:?}); using the closed-form catalog ({})",
                    if numeric_vanishes { "vanishing" } else { "non-vanishing" },
                    lower_trend,
                    upper_trend,
                    if c.vanishes { "vanishing" } else { "non-vanishing" },
                ));
            }
            ConditionReport {
                astar_vanishes_at_endpoints: c.vanishes,
                tail_bound_exponents: c.tail_bound,
                integrable: c.integrability.is_some(),
                integrability_exponents: c.integrability,
                from_catalog: true,
                lower_trend,
                upper_trend,
                warnings,
            }
        }
        None => {
            warnings.push(String::from(
                "custom shape: conditions judged from numerical endpoint decay only; tail-bound exponents not determined",
            ));
            ConditionReport {
                astar_vanishes_at_endpoints: numeric_vanishes,
                tail_bound_exponents: None,
                // vanishing A* implies integrability for some exponent
                integrable: numeric_vanishes,
                integrability_exponents: None,
                from_catalog: false,
                lower_trend,
                upper_trend,
                warnings,
            }
        }
    }
}
