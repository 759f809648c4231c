//! Exact evaluation of the goodness-of-fit statistics from order statistics.
//!
//! All sup-type statistics are `sqrt(n) sup_D |F_n(t) - t| / w(t)` for a
//! weight `w(t) = [t(1-t)]^tau`, `tau` in `[0, 1/2]`, and a domain `D` that
//! is either (0, 1) or `[kappa, 1 - kappa]`.
//!
//! # Reduction to jump points
//!
//! Between two consecutive order statistics `F_n` is a constant `c`. Take
//! `tau` in `(0, 1/2]` and `t < c`. Then
//!
//! ```text
//! d/dt log((c - t) / w(t)) = -1/(c - t) + tau (2t - 1) / (t (1 - t)).
//! ```
//!
//! For `t < 1/2` both terms are negative. For `t >= 1/2`, `c <= 1` gives
//! `1/(c - t) >= 1/(1 - t) = t / (t (1 - t))`, and `tau (2t - 1) <= t - 1/2 < t`,
//! so the derivative is again negative. Hence `(c - t)/w(t)` decreases where
//! it is positive, and by the substitution `t -> 1 - t`, `c -> 1 - c` the
//! quantity `(t - c)/w(t)` increases where it is positive. On each constant
//! piece the supremum of `|c - t|/w(t)` is therefore reached at a piece
//! endpoint: an order statistic (as a value or a one-sided limit) or an
//! endpoint of `D`. With `tau = 0` the same holds trivially.
//!
//! For `D = (0, 1)` the endpoints contribute nothing: near 0, `F_n = 0`
//! and `t / w(t) -> 0`; near 1 symmetrically. For `D = [kappa, 1 - kappa]`
//! the endpoint values are the boundary term `T_n / w(kappa)` with
//! `T_n = max(|c_1/n - kappa|, |c_2/n - 1 + kappa|)`, `c_1 = #{U <= kappa}`,
//! `c_2 = #{U < 1 - kappa}`.

pub mod oracle;

use alloc::string::String;
use core::fmt;

use crate::error::{check_open_half, Error, Result};
use crate::sample::NullSample;

/// Rule producing the Eicker-Jaeschke truncation point `kappa_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KappaRule {
    /// `n^(-1/2) / 2`.
    HalfRootN,
    /// `n^(-9/10)`.
    NineTenths,
    /// `scale * n^(-exponent)`.
    Power { scale: f64, exponent: f64 },
    /// A constant `kappa`, as for the Borovkov-Sycheva statistic.
    Fixed(f64),
}

impl KappaRule {
    pub fn kappa(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let k = match *self {
            KappaRule::HalfRootN => 0.5 / libm::sqrt(nf),
            KappaRule::NineTenths => libm::pow(nf, -0.9),
            KappaRule::Power { scale, exponent } => scale * libm::pow(nf, -exponent),
            KappaRule::Fixed(k) => k,
        };
        if k > 0.0 && k < 0.5 {
            Ok(k)
        } else {
            Err(Error::KappaOutOfRange { n, kappa: k })
        }
    }

    /// Exponent `e` such that `kappa_n` is of order `n^(-e)`.
    pub fn decay_exponent(&self) -> f64 {
        match *self {
            KappaRule::HalfRootN => 0.5,
            KappaRule::NineTenths => 0.9,
            KappaRule::Power { exponent, .. } => exponent,
            KappaRule::Fixed(_) => 0.0,
        }
    }

    /// Short text form, also accepted by the CLI parser.
    pub fn label(&self) -> String {
        match *self {
            KappaRule::HalfRootN => "half-root".into(),
            KappaRule::NineTenths => "nine-tenths".into(),
            KappaRule::Power { scale, exponent } => alloc::format!("power:{scale}:{exponent}"),
            KappaRule::Fixed(k) => alloc::format!("fixed:{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StatisticKind {
    Ks,
    Bs,
    Ej,
    AdSup,
    AdLog,
    WeightedTau,
    AdInt,
}

impl StatisticKind {
    pub fn name(&self) -> &'static str {
        match self {
            StatisticKind::Ks => "KS",
            StatisticKind::Bs => "BS",
            StatisticKind::Ej => "EJ",
            StatisticKind::AdSup => "AD_SUP",
            StatisticKind::AdLog => "AD_LOG",
            StatisticKind::WeightedTau => "WEIGHTED_TAU",
            StatisticKind::AdInt => "AD_INT",
        }
    }
}

/// A statistic together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum StatisticSpec {
    /// Kolmogorov-Smirnov `K_n`.
    Ks,
    /// Borovkov-Sycheva `G_n(kappa)`: sup-Anderson-Darling on a fixed
    /// `[kappa, 1 - kappa]`.
    Bs { kappa: f64 },
    /// Eicker-Jaeschke `E_n(kappa_n)`.
    Ej { rule: KappaRule },
    /// Sup-Anderson-Darling `S_n` (higher criticism).
    AdSup,
    /// `M_n = sqrt(log(1 + S_n))`.
    AdLog,
    /// `C_n(tau)`, weight `[t(1-t)]^tau`.
    WeightedTau { tau: f64 },
    /// Integral Anderson-Darling `I_n`, the square root of `A^2`.
    AdInt,
}

impl StatisticSpec {
    pub fn kind(&self) -> StatisticKind {
        match self {
            StatisticSpec::Ks => StatisticKind::Ks,
            StatisticSpec::Bs { .. } => StatisticKind::Bs,
            StatisticSpec::Ej { .. } => StatisticKind::Ej,
            StatisticSpec::AdSup => StatisticKind::AdSup,
            StatisticSpec::AdLog => StatisticKind::AdLog,
            StatisticSpec::WeightedTau { .. } => StatisticKind::WeightedTau,
            StatisticSpec::AdInt => StatisticKind::AdInt,
        }
    }

    /// Checks parameter ranges, and for EJ that the rule is usable at `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            StatisticSpec::Bs { kappa } => check_open_half("kappa", kappa).map(|_| ()),
            StatisticSpec::WeightedTau { tau } => check_open_half("tau", tau).map(|_| ()),
            StatisticSpec::Ej { rule } => rule.kappa(n).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Parameter string used in tables, e.g. `kappa=0.1`; empty when the
    /// statistic has no parameter.
    pub fn params(&self) -> String {
        match *self {
            StatisticSpec::Bs { kappa } => alloc::format!("kappa={kappa}"),
            StatisticSpec::Ej { rule } => alloc::format!("rule={}", rule.label()),
            StatisticSpec::WeightedTau { tau } => alloc::format!("tau={tau}"),
            _ => String::new(),
        }
    }

    /// Evaluates the statistic on a validated sample.
    pub fn evaluate(&self, s: &NullSample) -> Result<StatisticValue> {
        let n = s.len();
        self.validate(n)?;
        Ok(StatisticValue {
            value: self.evaluate_sorted(s.values()),
            spec: *self,
            n,
        })
    }

    /// Hot-path evaluation on sorted values in (0, 1). Parameters must have
    /// been validated for `u.len()`; an EJ rule outside its range yields NaN.
    pub fn evaluate_sorted(&self, u: &[f64]) -> f64 {
        match *self {
            StatisticSpec::Ks => ks(u),
            StatisticSpec::Bs { kappa } => restricted_ad(u, kappa),
            StatisticSpec::Ej { rule } => match rule.kappa(u.len()) {
                Ok(k) => restricted_ad(u, k),
                Err(_) => f64::NAN,
            },
            StatisticSpec::AdSup => ad_sup(u),
            StatisticSpec::AdLog => libm::sqrt(libm::log1p(ad_sup(u))),
            StatisticSpec::WeightedTau { tau } => weighted_tau(u, tau),
            StatisticSpec::AdInt => ad_int(u),
        }
    }
}

impl fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        if p.is_empty() {
            f.write_str(self.kind().name())
        } else {
            write!(f, "{}({})", self.kind().name(), p)
        }
    }
}

/// A statistic evaluated on a sample of size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StatisticValue {
    pub value: f64,
    pub spec: StatisticSpec,
    pub n: usize,
}

pub fn ks_statistic(s: &NullSample) -> StatisticValue {
    value_of(StatisticSpec::Ks, s)
}

pub fn s_statistic(s: &NullSample) -> StatisticValue {
    value_of(StatisticSpec::AdSup, s)
}

pub fn m_statistic(s: &NullSample) -> StatisticValue {
    value_of(StatisticSpec::AdLog, s)
}

pub fn i_statistic(s: &NullSample) -> StatisticValue {
    value_of(StatisticSpec::AdInt, s)
}

pub fn bs_statistic(s: &NullSample, kappa: f64) -> Result<StatisticValue> {
    StatisticSpec::Bs { kappa }.evaluate(s)
}

/// Eicker-Jaeschke statistic for an explicit truncation point `kappa_n`.
pub fn ej_statistic(s: &NullSample, kappa_n: f64) -> Result<StatisticValue> {
    check_open_half("kappa_n", kappa_n)?;
    Ok(StatisticValue {
        value: restricted_ad(s.values(), kappa_n),
        spec: StatisticSpec::Ej {
            rule: KappaRule::Fixed(kappa_n),
        },
        n: s.len(),
    })
}

pub fn c_statistic(s: &NullSample, tau: f64) -> Result<StatisticValue> {
    StatisticSpec::WeightedTau { tau }.evaluate(s)
}

fn value_of(spec: StatisticSpec, s: &NullSample) -> StatisticValue {
    StatisticValue {
        value: spec.evaluate_sorted(s.values()),
        spec,
        n: s.len(),
    }
}

/// `sqrt(n) max_i max(i/n - U_i, U_i - (i-1)/n)`.
pub fn ks(u: &[f64]) -> f64 {
    let nf = u.len() as f64;
    let inv = 1.0 / nf;
    let mut d = 0.0f64;
    for (i, &x) in u.iter().enumerate() {
        let lo = i as f64 * inv;
        let hi = (i + 1) as f64 * inv;
        d = d.max(hi - x).max(x - lo);
    }
    libm::sqrt(nf) * d
}

/// Sup-Anderson-Darling `S_n` over (0, 1).
pub fn ad_sup(u: &[f64]) -> f64 {
    let nf = u.len() as f64;
    let inv = 1.0 / nf;
    let mut d = 0.0f64;
    for (i, &x) in u.iter().enumerate() {
        let lo = i as f64 * inv;
        let hi = (i + 1) as f64 * inv;
        let dev = (hi - x).max(x - lo);
        d = d.max(dev / libm::sqrt(x * (1.0 - x)));
    }
    libm::sqrt(nf) * d
}

/// `C_n(tau)` over (0, 1).
pub fn weighted_tau(u: &[f64], tau: f64) -> f64 {
    let nf = u.len() as f64;
    let inv = 1.0 / nf;
    let mut d = 0.0f64;
    for (i, &x) in u.iter().enumerate() {
        let lo = i as f64 * inv;
        let hi = (i + 1) as f64 * inv;
        let dev = (hi - x).max(x - lo);
        d = d.max(dev * libm::exp(-tau * libm::log(x * (1.0 - x))));
    }
    libm::sqrt(nf) * d
}

/// Sup-Anderson-Darling restricted to `[kappa, 1 - kappa]`: the jump terms
/// of order statistics inside the interval together with the boundary term.
pub fn restricted_ad(u: &[f64], kappa: f64) -> f64 {
    let n = u.len();
    let nf = n as f64;
    let inv = 1.0 / nf;
    let upper = 1.0 - kappa;
    // c1 = #{U <= kappa}, c2 = #{U < 1 - kappa}
    let c1 = u.partition_point(|&x| x <= kappa);
    let c2 = u.partition_point(|&x| x < upper);
    let t_n = (c1 as f64 * inv - kappa).abs().max((c2 as f64 * inv - upper).abs());
    let mut d = t_n / libm::sqrt(kappa * upper);
    let start = u.partition_point(|&x| x < kappa);
    let end = u.partition_point(|&x| x <= upper);
    for (i, &x) in u.iter().enumerate().take(end).skip(start) {
        let lo = i as f64 * inv;
        let hi = (i + 1) as f64 * inv;
        let dev = (hi - x).abs().max((x - lo).abs());
        d = d.max(dev / libm::sqrt(x * (1.0 - x)));
    }
    libm::sqrt(nf) * d
}

/// Integral Anderson-Darling `I_n = sqrt(A^2)` with
/// `A^2 = -n - (1/n) sum_i [(2i-1) log U_i + (2(n-i)+1) log(1-U_i)]`.
pub fn ad_int(u: &[f64]) -> f64 {
    let n = u.len();
    let nf = n as f64;
    let mut s = 0.0;
    for (i, &x) in u.iter().enumerate() {
        let a = (2 * i + 1) as f64;
        let b = (2 * (n - i) - 1) as f64;
        s += a * libm::log(x) + b * libm::log1p(-x);
    }
    libm::sqrt((-nf - s / nf).max(0.0))
}
