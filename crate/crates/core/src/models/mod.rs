//! Alternative families for testing a standard normal null, viewed on (0, 1)
//! after the probability integral transform `t = Phi(x)`.
//!
//! Each model is a comparison distribution function `H` on (0, 1). The
//! uniform null corresponds to `H(t) = t`.

pub mod conditions;
pub mod shape;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::sample::{NullSample, ONE_MINUS_ULP};
use crate::special::{ln_norm_pdf, norm_cdf, norm_quantile, subbotin_ln_pdf, subbotin_tail, LN_SQRT_2PI};

pub use conditions::{condition_report, shape_conditions, ConditionReport, EndpointTrend, ExponentRange};
pub use shape::{LocalPath, Point, ShapeFunction};

/// The seven alternative families.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum AlternativeModel {
    /// M1: `Phi(x - mu)`.
    Shift { mu: f64 },
    /// M2: `Phi(x / sigma)`.
    Scale { sigma: f64 },
    /// M3: `(1 - p) Phi(x) + p Phi(x - mu)`.
    Contaminated { p: f64, mu: f64 },
    /// M4: probability mass moved into both tails of width `pi`; `H(t) =
    /// pi^((beta-1)/beta) t^(1/beta)` on `[0, pi)`, the identity on
    /// `[pi, 1 - pi]`, mirrored above.
    TailMass { beta: f64, pi: f64 },
    /// M5: `(1 - p) Phi(x) + p Phi(x)^delta` (Lehmann alternative).
    Lehmann { delta: f64, p: f64 },
    /// M6: `(1 - p) Phi(x) + p Sigma(x; gamma)`, `Sigma` the symmetric
    /// Subbotin law with density `C exp(-|x|^gamma / gamma)`.
    Subbotin { gamma: f64, p: f64 },
    /// M7: `(1 - p) Phi(x) + p Pi(x; zeta)`, `Pi` the symmetric Pareto law
    /// `|x|^(-zeta)/2` below -1, `1/2` on `[-1, 1]`.
    Pareto { zeta: f64, p: f64 },
}

fn param(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}

impl AlternativeModel {
    /// Validates parameter ranges.
    pub fn validate(&self) -> Result<Self> {
        match *self {
            AlternativeModel::Shift { mu } => param("mu", mu, mu != 0.0, "must be nonzero")?,
            AlternativeModel::Scale { sigma } => param(
                "sigma",
                sigma,
                sigma > 0.0 && sigma != 1.0,
                "must be positive and not 1",
            )?,
            AlternativeModel::Contaminated { p, mu } => {
                param("p", p, p > 0.0 && p < 1.0, "must lie in (0, 1)")?;
                param("mu", mu, mu != 0.0, "must be nonzero")?;
            }
            AlternativeModel::TailMass { beta, pi } => {
                param("beta", beta, beta > 0.0, "must be positive")?;
                param("pi", pi, (0.0..=0.5).contains(&pi), "must lie in [0, 0.5]")?;
            }
            AlternativeModel::Lehmann { delta, p } => {
                param("delta", delta, delta > 0.0, "must be positive")?;
                param("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
            }
            AlternativeModel::Subbotin { gamma, p } => {
                param("gamma", gamma, gamma > 0.0, "must be positive")?;
                param("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
            }
            AlternativeModel::Pareto { zeta, p } => {
                param("zeta", zeta, zeta > 0.0, "must be positive")?;
                param("p", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
            }
        }
        Ok(*self)
    }

    /// Short family code used by the CLI grammar (`m1` ... `m7`).
    pub fn code(&self) -> &'static str {
        match self {
            AlternativeModel::Shift { .. } => "m1",
            AlternativeModel::Scale { .. } => "m2",
            AlternativeModel::Contaminated { .. } => "m3",
            AlternativeModel::TailMass { .. } => "m4",
            AlternativeModel::Lehmann { .. } => "m5",
            AlternativeModel::Subbotin { .. } => "m6",
            AlternativeModel::Pareto { .. } => "m7",
        }
    }

    /// Named parameters in grammar order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            AlternativeModel::Shift { mu } => alloc::vec![("mu", mu)],
            AlternativeModel::Scale { sigma } => alloc::vec![("sigma", sigma)],
            AlternativeModel::Contaminated { p, mu } => alloc::vec![("p", p), ("mu", mu)],
            AlternativeModel::TailMass { beta, pi } => alloc::vec![("beta", beta), ("pi", pi)],
            AlternativeModel::Lehmann { delta, p } => alloc::vec![("delta", delta), ("p", p)],
            AlternativeModel::Subbotin { gamma, p } => alloc::vec![("gamma", gamma), ("p", p)],
            AlternativeModel::Pareto { zeta, p } => alloc::vec![("zeta", zeta), ("p", p)],
        }
    }

    /// `"p=0.05 mu=2"`-style parameter string.
    pub fn params_string(&self) -> String {
        let mut s = String::new();
        for (i, (k, v)) in self.params().iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&alloc::format!("{k}={v}"));
        }
        s
    }

    /// Returns a copy with parameter `name` replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut m = *self;
        let slot = match (&mut m, name) {
            (AlternativeModel::Shift { mu }, "mu") => mu,
            (AlternativeModel::Scale { sigma }, "sigma") => sigma,
            (AlternativeModel::Contaminated { p, .. }, "p") => p,
            (AlternativeModel::Contaminated { mu, .. }, "mu") => mu,
            (AlternativeModel::TailMass { beta, .. }, "beta") => beta,
            (AlternativeModel::TailMass { pi, .. }, "pi") => pi,
            (AlternativeModel::Lehmann { delta, .. }, "delta") => delta,
            (AlternativeModel::Lehmann { p, .. }, "p") => p,
            (AlternativeModel::Subbotin { gamma, .. }, "gamma") => gamma,
            (AlternativeModel::Subbotin { p, .. }, "p") => p,
            (AlternativeModel::Pareto { zeta, .. }, "zeta") => zeta,
            (AlternativeModel::Pareto { p, .. }, "p") => p,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "parameter",
                    value,
                    reason: "unknown parameter for this family",
                })
            }
        };
        *slot = value;
        m.validate()
    }

    /// True when the parameters make `H` the identity.
    pub fn is_null(&self) -> bool {
        match *self {
            AlternativeModel::Shift { mu } => mu == 0.0,
            AlternativeModel::Scale { sigma } => sigma == 1.0,
            AlternativeModel::Contaminated { p, mu } => p == 0.0 || mu == 0.0,
            AlternativeModel::TailMass { beta, pi } => pi == 0.0 || beta == 1.0,
            AlternativeModel::Lehmann { delta, p } => delta == 1.0 || p == 0.0,
            AlternativeModel::Subbotin { gamma, p } => gamma == 2.0 || p == 0.0,
            AlternativeModel::Pareto { p, .. } => p == 0.0,
        }
    }

    /// True when `H(t) + H(1 - t) = 1`.
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            AlternativeModel::Scale { .. }
                | AlternativeModel::TailMass { .. }
                | AlternativeModel::Subbotin { .. }
                | AlternativeModel::Pareto { .. }
        )
    }

    /// Comparison distribution function `H(t)`.
    pub fn comparison_cdf(&self, t: f64) -> f64 {
        self.cdf_at(Point::new(t))
    }

    /// `H(t)` at a point given with its complement.
    pub fn cdf_at(&self, pt: Point) -> f64 {
        if pt.t <= 0.5 {
            self.lower(pt)
        } else {
            1.0 - self.upper(pt)
        }
    }

    /// `H(t) - t`, the unnormalized shape, without cancellation at either
    /// end.
    pub fn deviation(&self, pt: Point) -> f64 {
        let w = self.mixing_weight();
        if pt.t <= 0.5 {
            w * (self.component_lower(pt) - pt.t)
        } else {
            w * (pt.q - self.component_upper(pt))
        }
    }

    /// `H(t)`, accurate in relative terms for small `t`.
    fn lower(&self, pt: Point) -> f64 {
        let w = self.mixing_weight();
        (1.0 - w) * pt.t + w * self.component_lower(pt)
    }

    /// `1 - H(1 - q)`, accurate in relative terms for small `q`.
    fn upper(&self, pt: Point) -> f64 {
        let w = self.mixing_weight();
        (1.0 - w) * pt.q + w * self.component_upper(pt)
    }

    /// Distribution function of the non-null component (of the whole model
    /// when it is not a mixture), transformed to (0, 1).
    fn component_lower(&self, pt: Point) -> f64 {
        match *self {
            AlternativeModel::Shift { mu } | AlternativeModel::Contaminated { mu, .. } => norm_cdf(pt.z() - mu),
            AlternativeModel::Scale { sigma } => norm_cdf(pt.z() / sigma),
            AlternativeModel::TailMass { beta, pi } => tail_mass_lower(pt.t, pt.q, beta, pi),
            AlternativeModel::Lehmann { delta, .. } => libm::exp(delta * log_t(pt)),
            AlternativeModel::Subbotin { gamma, .. } => {
                let z = pt.z();
                if z <= 0.0 {
                    subbotin_tail(z, gamma)
                } else {
                    1.0 - subbotin_tail(z, gamma)
                }
            }
            AlternativeModel::Pareto { zeta, .. } => pareto_cdf(pt.z(), zeta),
        }
    }

    /// Upper tail of the component at `1 - q`.
    fn component_upper(&self, pt: Point) -> f64 {
        match *self {
            AlternativeModel::Shift { mu } | AlternativeModel::Contaminated { mu, .. } => norm_cdf(mu - pt.z()),
            // 1 - t^delta = -expm1(delta log t)
            AlternativeModel::Lehmann { delta, .. } => -libm::expm1(delta * log_t(pt)),
            // the remaining components are symmetric
            _ => self.component_lower(pt.mirror()),
        }
    }

    /// `log h(t)` of the non-null mixture component (or of the whole model
    /// when it is not a mixture); `-inf` where that density vanishes.
    pub fn ln_component_density(&self, pt: Point) -> f64 {
        match *self {
            AlternativeModel::Shift { mu } | AlternativeModel::Contaminated { mu, .. } => mu * pt.z() - 0.5 * mu * mu,
            AlternativeModel::Scale { sigma } => {
                let z = pt.z();
                -libm::log(sigma) - 0.5 * z * z * (1.0 / (sigma * sigma) - 1.0)
            }
            AlternativeModel::TailMass { beta, pi } => {
                let s = pt.t.min(pt.q);
                if s < pi {
                    let c = (beta - 1.0) / beta * libm::log(pi);
                    c - libm::log(beta) + (1.0 / beta - 1.0) * libm::log(s)
                } else {
                    0.0
                }
            }
            AlternativeModel::Lehmann { delta, .. } => libm::log(delta) + (delta - 1.0) * log_t(pt),
            AlternativeModel::Subbotin { gamma, .. } => {
                let z = pt.z();
                subbotin_ln_pdf(z, gamma) - ln_norm_pdf(z)
            }
            AlternativeModel::Pareto { zeta, .. } => {
                let z = pt.z();
                if z.abs() <= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    libm::log(0.5 * zeta) - (zeta + 1.0) * libm::log(z.abs()) + 0.5 * z * z + LN_SQRT_2PI
                }
            }
        }
    }

    /// Mixing weight of the non-null component (1 for M1, M2, M4).
    pub fn mixing_weight(&self) -> f64 {
        match *self {
            AlternativeModel::Contaminated { p, .. }
            | AlternativeModel::Lehmann { p, .. }
            | AlternativeModel::Subbotin { p, .. }
            | AlternativeModel::Pareto { p, .. } => p,
            _ => 1.0,
        }
    }

    /// Unnormalized density perturbation `h(t) - 1`.
    pub fn density_deviation(&self, pt: Point) -> f64 {
        self.mixing_weight() * libm::expm1(self.ln_component_density(pt))
    }

    /// One draw from `H`.
    pub fn sample_one<R: RandomSource + ?Sized>(&self, rng: &mut R) -> f64 {
        let t = match *self {
            AlternativeModel::Shift { mu } => norm_cdf(rng.std_normal() + mu),
            AlternativeModel::Scale { sigma } => norm_cdf(sigma * rng.std_normal()),
            AlternativeModel::Contaminated { p, mu } => {
                if rng.bernoulli(p) {
                    norm_cdf(rng.std_normal() + mu)
                } else {
                    rng.uniform()
                }
            }
            AlternativeModel::TailMass { beta, pi } => {
                let v = rng.uniform();
                let scale = libm::pow(pi, 1.0 - beta);
                if v < pi {
                    libm::pow(v, beta) * scale
                } else if v > 1.0 - pi {
                    1.0 - libm::pow(1.0 - v, beta) * scale
                } else {
                    v
                }
            }
            AlternativeModel::Lehmann { delta, p } => {
                if rng.bernoulli(p) {
                    libm::exp(libm::log(rng.uniform()) / delta)
                } else {
                    rng.uniform()
                }
            }
            AlternativeModel::Subbotin { gamma, p } => {
                if rng.bernoulli(p) {
                    let g = rng.gamma(1.0 / gamma);
                    let x = libm::pow(gamma * g, 1.0 / gamma);
                    let x = if rng.bernoulli(0.5) { x } else { -x };
                    norm_cdf(x)
                } else {
                    rng.uniform()
                }
            }
            AlternativeModel::Pareto { zeta, p } => {
                if rng.bernoulli(p) {
                    let v = rng.uniform();
                    let x = if v < 0.5 {
                        -libm::pow(2.0 * v, -1.0 / zeta)
                    } else {
                        libm::pow(2.0 * (1.0 - v), -1.0 / zeta)
                    };
                    norm_cdf(x)
                } else {
                    rng.uniform()
                }
            }
        };
        // draws beyond double resolution land on the nearest representable
        // interior value
        t.clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP)
    }

    /// `n` sorted draws.
    pub fn sample<R: RandomSource + ?Sized>(&self, n: usize, rng: &mut R) -> NullSample {
        let mut v = Vec::with_capacity(n);
        self.fill_sample(&mut v, n, rng);
        NullSample::from_sorted_unchecked(v)
    }

    /// Writes `n` sorted draws into `out` (cleared first).
    pub fn fill_sample<R: RandomSource + ?Sized>(&self, out: &mut Vec<f64>, n: usize, rng: &mut R) {
        out.clear();
        for _ in 0..n {
            out.push(self.sample_one(rng));
        }
        out.sort_unstable_by(f64::total_cmp);
    }
}

impl fmt::Display for AlternativeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code(), self.params_string())
    }
}

fn log_t(pt: Point) -> f64 {
    if pt.t <= 0.5 {
        libm::log(pt.t)
    } else {
        libm::log1p(-pt.q)
    }
}

fn tail_mass_lower(t: f64, q: f64, beta: f64, pi: f64) -> f64 {
    let c = libm::pow(pi, (beta - 1.0) / beta);
    if t < pi {
        c * libm::pow(t, 1.0 / beta)
    } else if q < pi {
        1.0 - c * libm::pow(q, 1.0 / beta)
    } else {
        t
    }
}

/// Symmetric Pareto distribution function.
pub fn pareto_cdf(x: f64, zeta: f64) -> f64 {
    if x < -1.0 {
        0.5 * libm::pow(-x, -zeta)
    } else if x <= 1.0 {
        0.5
    } else {
        1.0 - 0.5 * libm::pow(x, -zeta)
    }
}

/// Standard normal quantile of a point, from whichever side is accurate.
pub(crate) fn probit(pt: Point) -> f64 {
    if pt.t <= 0.5 {
        norm_quantile(pt.t)
    } else {
        -norm_quantile(pt.q)
    }
}
