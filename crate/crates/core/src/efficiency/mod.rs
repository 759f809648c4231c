//! Intermediate slopes and efficiencies with respect to the Kolmogorov
//! statistic, computed from a shape function `A`.
//!
//! For a local alternative `t + theta_n A(t)` each statistic `T` has an
//! intermediate slope `c_T b_T^2` with `b_T = sqrt(n) theta_n` times a
//! functional of `A`:
//!
//! | statistic | `b_T / (sqrt(n) theta_n)` | `c_T` |
//! |---|---|---|
//! | KS | `sup |A|` | 2 |
//! | BS(kappa) | `sup` of `|A*|` over `[kappa, 1 - kappa]` | 1/2 |
//! | EJ | `sup |A*|` | 1/2 |
//! | AD_INT | `||A*||_2` | 1 |
//!
//! and `b` for AD_LOG is `sqrt(log b_EJ)` with index 2. Efficiencies are
//! ratios of slopes:
//!
//! * `e_GK(kappa) = sup_[kappa,1-kappa] A*^2 / (4 sup A^2)`,
//! * `e_EK = sup A*^2 / (4 sup A^2)`, defined when `A*` vanishes at both
//!   ends,
//! * `e_IK = ||A*||_2^2 / (2 sup A^2)`,
//! * `e_MK = 0` under the tail bound.
//!
//! Sup searches run on a logit grid (uniform in `log(t/(1-t))`, which is
//! log-spaced towards both ends) followed by golden-section refinement of
//! every competitive local maximum. Integrals are taken in the logit
//! variable `x`, where `dt = t(1-t) dx` absorbs the weight.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::shape::golden_max;
use crate::models::{shape_conditions, ConditionReport, EndpointTrend, Point, ShapeFunction};
use crate::quad::{gauss_legendre, integrate};
use crate::special::norm_cdf;
use crate::statistics::oracle::GRID_EDGE;
use crate::statistics::KappaRule;

/// Moderate-deviation index constants `c_T`.
pub mod index {
    pub const KS: f64 = 2.0;
    pub const BS: f64 = 0.5;
    pub const EJ: f64 = 0.5;
    pub const AD_LOG: f64 = 2.0;
    pub const AD_INT: f64 = 1.0;

    /// Index of the weighted statistic with exponent `tau`: `2^(1 - 4 tau)`.
    pub fn weighted_tau(tau: f64) -> f64 {
        libm::exp2(1.0 - 4.0 * tau)
    }
}

/// Points in the sup-search grid.
pub const SUP_GRID: usize = 20_001;
/// Argument tolerance of the golden-section refinement, in the logit
/// variable (at most a quarter of this in `t`).
pub const SUP_TOL: f64 = 1e-8;

/// A subinterval of (0, 1); `lo = 0` or `hi = 1` stand for the open ends.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn full() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    /// `[kappa, 1 - kappa]`.
    pub fn restricted(kappa: f64) -> Result<Self> {
        crate::error::check_open_half("kappa", kappa)?;
        Ok(Self {
            lo: kappa,
            hi: 1.0 - kappa,
        })
    }

    fn lower_point(&self) -> Point {
        if self.lo > 0.0 {
            Point::new(self.lo)
        } else {
            Point::new(GRID_EDGE)
        }
    }

    fn upper_point(&self) -> Point {
        if self.hi < 1.0 {
            Point::from_complement(1.0 - self.hi)
        } else {
            Point::from_complement(GRID_EDGE)
        }
    }

    pub fn touches_lower(&self) -> bool {
        self.lo == 0.0
    }

    pub fn touches_upper(&self) -> bool {
        self.hi == 1.0
    }
}

/// Location and value of a supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupValue {
    /// Maximizer.
    pub t0: f64,
    /// Supremum over the searched range.
    pub m0: f64,
    /// The function grows without bound towards 0 (the value is then the
    /// sup over `[1e-12, ...]` only).
    pub diverges_lower: bool,
    pub diverges_upper: bool,
}

impl SupValue {
    pub fn is_finite(&self) -> bool {
        !self.diverges_lower && !self.diverges_upper
    }
}

/// Maximizes `f` over the logit range of `domain`.
fn sup_search(f: &dyn Fn(Point) -> f64, domain: Domain) -> (f64, f64) {
    let (pa, pb) = (domain.lower_point(), domain.upper_point());
    let (xa, xb) = (pa.logit(), pb.logit());
    let at = |x: f64| {
        if x <= xa {
            pa
        } else if x >= xb {
            pb
        } else {
            Point::from_logit(x)
        }
    };
    let xs: Vec<f64> = (0..SUP_GRID)
        .map(|k| xa + (xb - xa) * k as f64 / (SUP_GRID - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(at(x))).collect();
    let top = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut best = (xa, f64::NEG_INFINITY);
    for k in 0..SUP_GRID {
        let left = if k > 0 { ys[k - 1] } else { f64::NEG_INFINITY };
        let right = if k + 1 < SUP_GRID { ys[k + 1] } else { f64::NEG_INFINITY };
        if ys[k] < left || ys[k] < right || ys[k] < top - 0.1 * top.abs() {
            continue;
        }
        let cand = if k == 0 || k + 1 == SUP_GRID {
            (xs[k], ys[k])
        } else {
            golden_max(|x| f(at(x)), xs[k - 1], xs[k + 1], SUP_TOL)
        };
        let cand = if cand.1 >= ys[k] { cand } else { (xs[k], ys[k]) };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    let p = at(best.0);
    (p.t, best.1)
}

/// `sup |A*|` over `domain`, with maximizer. Divergence towards an end is
/// flagged when the domain touches it and `|A*|` grows there.
///
/// On a restricted domain that contains the full-domain maximizer, the
/// full-domain result is returned as is, so restricted sups never exceed
/// the full one by search noise.
pub fn sup_abs_astar(shape: &ShapeFunction, domain: Domain) -> SupValue {
    let f = |p: Point| shape.star(p).abs();
    let (mut t0, mut m0) = sup_search(&f, domain);
    if domain.lo > 0.0 || domain.hi < 1.0 {
        let (ft, fm) = sup_search(&f, Domain::full());
        if ft >= domain.lo && ft <= domain.hi {
            (t0, m0) = (ft, fm);
        }
    }
    let cond = shape_conditions(shape);
    let diverging = |trend: EndpointTrend| {
        trend == EndpointTrend::Growing
            || (!cond.astar_vanishes_at_endpoints && trend != EndpointTrend::Decaying && cond.from_catalog)
    };
    SupValue {
        t0,
        m0,
        diverges_lower: domain.touches_lower() && diverging(cond.lower_trend),
        diverges_upper: domain.touches_upper() && diverging(cond.upper_trend),
    }
}

/// `sup |A|` over (0, 1), with maximizer.
pub fn sup_abs_a(shape: &ShapeFunction) -> (f64, f64) {
    sup_search(&|p| shape.value(p).abs(), Domain::full())
}

/// `e_GK(kappa)`.
pub fn e_gk(shape: &ShapeFunction, kappa: f64) -> Result<f64> {
    let m = sup_abs_astar(shape, Domain::restricted(kappa)?).m0;
    let (_, a) = sup_abs_a(shape);
    Ok(m * m / (4.0 * a * a))
}

/// `e_EK`; refuses when `A*` does not vanish at both ends (see
/// [`weak_slope_heavy_tail`] for that case).
pub fn e_ek(shape: &ShapeFunction) -> Result<f64> {
    let cond = shape_conditions(shape);
    if !cond.astar_vanishes_at_endpoints {
        return Err(Error::ConditionFails(String::from(
            "A* does not vanish at the endpoints; e_EK is not defined, use the weak heavy-tail slope",
        )));
    }
    let m = sup_abs_astar(shape, Domain::full()).m0;
    let (_, a) = sup_abs_a(shape);
    Ok(m * m / (4.0 * a * a))
}

/// Result of an integral functional.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Functional {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

const LOGIT_MAX: f64 = 700.0;

/// `integral of A*^2 = integral of A(x)^2 dx` over the logit line.
///
/// The representable range `|x| <= 700` is integrated adaptively; beyond it
/// the integrand is extrapolated as a power of `|x|` fitted at 350 and 700.
/// A fitted power of `|x|^-1` or slower means divergence.
pub fn l2_astar_squared(shape: &ShapeFunction) -> Functional {
    let g = |x: f64| {
        let v = shape.value(Point::from_logit(x));
        v * v
    };
    let cuts = [-LOGIT_MAX, -50.0, -10.0, 10.0, 50.0, LOGIT_MAX];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    for w in cuts.windows(2) {
        let r = integrate(g, w[0], w[1], 1e-13, 1e-12, 4000);
        value += r.value;
        error += r.error;
        converged &= r.converged;
    }
    for sign in [-1.0, 1.0] {
        let (g1, g2) = (g(sign * 0.5 * LOGIT_MAX), g(sign * LOGIT_MAX));
        if g2 == 0.0 {
            continue;
        }
        let r = libm::log(g1 / g2) / core::f64::consts::LN_2;
        if r > 1.0 {
            let tail = g2 * LOGIT_MAX / (r - 1.0);
            value += tail;
            error += tail;
        } else {
            converged = false;
        }
    }
    Functional {
        value,
        error,
        converged,
    }
}

/// `e_IK`; refuses when the integrability condition fails or the integral
/// does not converge.
pub fn e_ik(shape: &ShapeFunction) -> Result<f64> {
    let cond = shape_conditions(shape);
    if !cond.integrable {
        return Err(Error::ConditionFails(String::from(
            "integrability condition fails; e_IK is not defined",
        )));
    }
    let l2 = l2_astar_squared(shape);
    if !l2.converged {
        return Err(Error::Divergence(String::from(
            "||A*||_2 does not converge numerically",
        )));
    }
    let (_, a) = sup_abs_a(shape);
    Ok(l2.value / (2.0 * a * a))
}

const RHO_RANGE: f64 = 40.0;
const RHO_NODES: usize = 12;

/// `rho_A^2 / 2` on `panels` equal panels over `[-40, 40]` in the logit
/// variable: `integral over y of (1 - t(y)) A(y) F(y)`, `F(y) = integral
/// over x < y of t(x) A(x)`. The inner integral is accumulated panel by
/// panel, and within a panel taken by a Gauss rule on `[a, y]`.
fn rho_half(shape: &ShapeFunction, panels: usize) -> f64 {
    let (gx, gw) = gauss_legendre(RHO_NODES);
    let h = 2.0 * RHO_RANGE / panels as f64;
    let mut cumulative = 0.0;
    let mut total = 0.0;
    for j in 0..panels {
        let a = -RHO_RANGE + j as f64 * h;
        let mut panel_inner = 0.0;
        for k in 0..RHO_NODES {
            let y = a + 0.5 * h * (gx[k] + 1.0);
            let py = Point::from_logit(y);
            let ay = shape.value(py);
            let half = 0.5 * (y - a);
            let mut partial = 0.0;
            for i in 0..RHO_NODES {
                let x = a + half * (gx[i] + 1.0);
                let px = Point::from_logit(x);
                partial += gw[i] * px.t * shape.value(px);
            }
            total += 0.5 * h * gw[k] * py.q * ay * (cumulative + half * partial);
            panel_inner += 0.5 * h * gw[k] * py.t * ay;
        }
        cumulative += panel_inner;
    }
    total
}

/// `rho_A`, with the difference between 200- and 400-panel evaluations as
/// error estimate.
pub fn rho_a(shape: &ShapeFunction) -> Functional {
    let coarse = libm::sqrt((2.0 * rho_half(shape, 200)).max(0.0));
    let fine = libm::sqrt((2.0 * rho_half(shape, 400)).max(0.0));
    let error = (fine - coarse).abs();
    Functional {
        value: fine,
        error,
        converged: error <= 1e-6 * fine.max(1e-300),
    }
}

/// Limiting power `Phi(w ||A*||_2 / rho_A)` of AD_INT at shift `w`.
pub fn asymptotic_power_i(shape: &ShapeFunction, w: f64) -> Result<f64> {
    let l2 = l2_astar_squared(shape);
    if !l2.converged {
        return Err(Error::Divergence(String::from(
            "||A*||_2 does not converge numerically",
        )));
    }
    let rho = rho_a(shape);
    Ok(norm_cdf(w * libm::sqrt(l2.value) / rho.value))
}

/// The functionals of `A` behind every slope.
#[derive(Debug, Clone)]
pub struct SlopeValues {
    shape: ShapeFunction,
    /// `sup |A|`.
    pub sup_a: f64,
    /// `sup |A*|` over (0, 1) (over the grid range when divergent).
    pub sup_astar: f64,
    /// `||A*||_2`.
    pub l2_astar: f64,
}

impl SlopeValues {
    pub fn new(shape: &ShapeFunction) -> Self {
        let (_, sup_a) = sup_abs_a(shape);
        let sup_astar = sup_abs_astar(shape, Domain::full()).m0;
        let l2 = l2_astar_squared(shape);
        Self {
            shape: shape.clone(),
            sup_a,
            sup_astar,
            l2_astar: if l2.converged {
                libm::sqrt(l2.value)
            } else {
                f64::INFINITY
            },
        }
    }

    fn root(n: f64, theta: f64) -> f64 {
        libm::sqrt(n) * theta
    }

    pub fn b_k(&self, n: f64, theta: f64) -> f64 {
        Self::root(n, theta) * self.sup_a
    }

    pub fn b_g(&self, n: f64, theta: f64, kappa: f64) -> Result<f64> {
        let m = sup_abs_astar(&self.shape, Domain::restricted(kappa)?).m0;
        Ok(Self::root(n, theta) * m)
    }

    pub fn b_e(&self, n: f64, theta: f64) -> f64 {
        Self::root(n, theta) * self.sup_astar
    }

    /// `sqrt(log b_E)`; NaN while `b_E < 1`.
    pub fn b_m(&self, n: f64, theta: f64) -> f64 {
        libm::sqrt(libm::log(self.b_e(n, theta)))
    }

    pub fn b_i(&self, n: f64, theta: f64) -> f64 {
        Self::root(n, theta) * self.l2_astar
    }

    /// Slope `c_T b_T^2`. Under the intermediate approach the admissible
    /// levels satisfy `log alpha_n ~ -slope`.
    pub fn slope(index: f64, b: f64) -> f64 {
        index * b * b
    }
}

/// One row of [`weak_slope_heavy_tail`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeakSlopeRow {
    pub n: u64,
    pub kappa: f64,
    pub theta: f64,
    /// `sup |A*|` over `[kappa_n, 1 - kappa_n]`.
    pub m_n: f64,
    /// Its maximizer.
    pub t_n: f64,
    /// `n theta_n^2 m_n^2 / 2`.
    pub slope: f64,
    /// `m_n^2 / (4 sup A^2)`, the weak efficiency ratio at this `n`.
    pub efficiency_ratio: f64,
}

/// `theta_n = scale n^-exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThetaRule {
    pub scale: f64,
    pub exponent: f64,
}

impl ThetaRule {
    pub fn theta(&self, n: u64) -> f64 {
        self.scale * libm::pow(n as f64, -self.exponent)
    }
}

/// Restricted sups along a sample-size grid, for shapes whose `A*` does not
/// vanish at the ends.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeakSlope {
    pub rows: Vec<WeakSlopeRow>,
    /// `m_n` strictly increases along the grid.
    pub growing: bool,
    /// The shape satisfies the vanishing condition, so `m_n` stays bounded.
    pub bounded_by_condition: bool,
}

pub fn weak_slope_heavy_tail(
    shape: &ShapeFunction,
    kappa_rule: KappaRule,
    theta_rule: ThetaRule,
    n_grid: &[u64],
) -> Result<WeakSlope> {
    let (_, sup_a) = sup_abs_a(shape);
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let kappa = kappa_rule.kappa(n as usize)?;
        let s = sup_abs_astar(shape, Domain::restricted(kappa)?);
        let theta = theta_rule.theta(n);
        rows.push(WeakSlopeRow {
            n,
            kappa,
            theta,
            m_n: s.m0,
            t_n: s.t0,
            slope: n as f64 * theta * theta * s.m0 * s.m0 / 2.0,
            efficiency_ratio: s.m0 * s.m0 / (4.0 * sup_a * sup_a),
        });
    }
    let growing = rows.windows(2).all(|w| w[1].m_n > w[0].m_n);
    Ok(WeakSlope {
        rows,
        growing,
        bounded_by_condition: shape_conditions(shape).astar_vanishes_at_endpoints,
    })
}

/// Which quantities in an [`EfficiencyReport`] are defined.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiniteFlags {
    pub sup_astar_finite: bool,
    pub l2_astar_finite: bool,
    pub rho_converged: bool,
    pub e_ek_defined: bool,
    pub e_ik_defined: bool,
}

/// All efficiency quantities of one shape.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EfficiencyReport {
    pub shape: String,
    pub t0: f64,
    pub m0: f64,
    pub sup_a: f64,
    pub l2_astar: f64,
    pub rho_a: f64,
    /// `(kappa, e_GK(kappa))`.
    pub e_gk: Vec<(f64, f64)>,
    pub e_ek: Option<f64>,
    pub e_ik: Option<f64>,
    /// 0 under the tail bound, undefined otherwise.
    pub e_mk: Option<f64>,
    pub flags: FiniteFlags,
    pub conditions: ConditionReport,
}

impl EfficiencyReport {
    pub fn new(shape: &ShapeFunction, kappas: &[f64]) -> Result<Self> {
        let conditions = shape_conditions(shape);
        let sup = sup_abs_astar(shape, Domain::full());
        let (_, sup_a) = sup_abs_a(shape);
        let l2 = l2_astar_squared(shape);
        let rho = rho_a(shape);
        let four_a2 = 4.0 * sup_a * sup_a;
        let mut e_gk_list = Vec::with_capacity(kappas.len());
        for &k in kappas {
            let m = sup_abs_astar(shape, Domain::restricted(k)?).m0;
            e_gk_list.push((k, m * m / four_a2));
        }
        let e_ek_defined = conditions.astar_vanishes_at_endpoints;
        let e_ik_defined = conditions.integrable && l2.converged;
        Ok(Self {
            shape: shape.name(),
            t0: sup.t0,
            m0: sup.m0,
            sup_a,
            l2_astar: libm::sqrt(l2.value),
            rho_a: rho.value,
            e_gk: e_gk_list,
            e_ek: e_ek_defined.then(|| sup.m0 * sup.m0 / four_a2),
            e_ik: e_ik_defined.then(|| l2.value / (2.0 * sup_a * sup_a)),
            e_mk: conditions.tail_bound_holds().then_some(0.0),
            flags: FiniteFlags {
                sup_astar_finite: sup.is_finite(),
                l2_astar_finite: l2.converged,
                rho_converged: rho.converged,
                e_ek_defined,
                e_ik_defined,
            },
            conditions,
        })
    }
}
