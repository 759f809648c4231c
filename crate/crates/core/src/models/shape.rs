//! Shape functions `A` of local alternatives `t + theta A(t)`, and the
//! mixture paths that realize them.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{probit, AlternativeModel};
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::sample::{NullSample, ONE_MINUS_ULP};

/// A point of (0, 1) carried together with its complement, so that both
/// ends of the interval keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub t: f64,
    pub q: f64,
}

impl Point {
    pub fn new(t: f64) -> Self {
        Self { t, q: 1.0 - t }
    }

    /// The point `1 - q`.
    pub fn from_complement(q: f64) -> Self {
        Self { t: 1.0 - q, q }
    }

    /// The point with log-odds `x`.
    pub fn from_logit(x: f64) -> Self {
        Self {
            t: 1.0 / (1.0 + libm::exp(-x)),
            q: 1.0 / (1.0 + libm::exp(x)),
        }
    }

    pub fn logit(&self) -> f64 {
        libm::log(self.t) - libm::log(self.q)
    }

    /// `t (1 - t)`.
    pub fn variance(&self) -> f64 {
        self.t * self.q
    }

    /// `1 - t`, as a point.
    pub fn mirror(&self) -> Self {
        Self { t: self.q, q: self.t }
    }

    /// Standard normal quantile of `t`.
    pub fn z(&self) -> f64 {
        probit(*self)
    }
}

/// Shape given as a closure of a [`Point`].
pub type ShapeFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum ShapeSource {
    Model(AlternativeModel),
    Custom {
        name: String,
        shape: ShapeFn,
        density: Option<ShapeFn>,
    },
}

impl fmt::Debug for ShapeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSource::Model(m) => f.debug_tuple("Model").field(m).finish(),
            ShapeSource::Custom { name, density, .. } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("has_density", &density.is_some())
                .finish(),
        }
    }
}

/// A shape `A` on (0, 1) with `A(0+) = A(1-) = 0`, its derivative `a` where
/// known, and `A*(t) = A(t) / sqrt(t (1 - t))`.
///
/// Shapes built from a model are normalized so that `||a||_1 = 1`; custom
/// shapes are used exactly as given. All efficiency functionals are
/// invariant under positive rescaling, and [`ShapeFunction::scaled`] exists
/// to check that.
#[derive(Debug, Clone)]
pub struct ShapeFunction {
    source: ShapeSource,
    divisor: f64,
    theta_norm: f64,
}

impl ShapeFunction {
    /// `A = (H - t) / ||h - 1||_1` for a model.
    pub fn from_model(model: &AlternativeModel) -> Result<Self> {
        let model = model.validate()?;
        if model.is_null() {
            return Err(Error::InvalidParameter {
                name: model.code(),
                value: 0.0,
                reason: "model coincides with the null",
            });
        }
        let theta = total_variation(&|p| model.deviation(p));
        Ok(Self {
            source: ShapeSource::Model(model),
            divisor: theta,
            theta_norm: theta,
        })
    }

    /// A user-supplied shape, with optional derivative.
    pub fn custom<F>(name: impl Into<String>, shape: F, density: Option<ShapeFn>) -> Self
    where
        F: Fn(Point) -> f64 + Send + Sync + 'static,
    {
        let shape: ShapeFn = Arc::new(shape);
        let theta = total_variation(&*shape);
        Self {
            source: ShapeSource::Custom {
                name: name.into(),
                shape,
                density,
            },
            divisor: 1.0,
            theta_norm: theta,
        }
    }

    /// `A(t) = t (1 - t)`, `a(t) = 1 - 2t`.
    pub fn parabola() -> Self {
        Self::custom("t(1-t)", |p: Point| p.t * p.q, Some(Arc::new(|p: Point| p.q - p.t)))
    }

    /// `c A` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            source: self.source.clone(),
            divisor: self.divisor / c,
            theta_norm: self.theta_norm,
        }
    }

    pub fn source(&self) -> &ShapeSource {
        &self.source
    }

    pub fn model(&self) -> Option<&AlternativeModel> {
        match &self.source {
            ShapeSource::Model(m) => Some(m),
            ShapeSource::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.source {
            ShapeSource::Model(m) => alloc::format!("{m}"),
            ShapeSource::Custom { name, .. } => name.clone(),
        }
    }

    /// `||h - 1||_1` of the model (the factor removed by normalization), or
    /// the total variation of a custom shape as given.
    pub fn theta_norm(&self) -> f64 {
        self.theta_norm
    }

    /// `||a||_1` of the shape as used (1 for model shapes).
    pub fn l1_norm(&self) -> f64 {
        self.theta_norm / self.divisor
    }

    /// `A` at a point.
    pub fn value(&self, p: Point) -> f64 {
        let raw = match &self.source {
            ShapeSource::Model(m) => m.deviation(p),
            ShapeSource::Custom { shape, .. } => shape(p),
        };
        raw / self.divisor
    }

    /// `A(t)`.
    pub fn a_of(&self, t: f64) -> f64 {
        self.value(Point::new(t))
    }

    /// `A*` at a point.
    pub fn star(&self, p: Point) -> f64 {
        self.value(p) / libm::sqrt(p.variance())
    }

    /// `A*(t)`.
    pub fn a_star(&self, t: f64) -> f64 {
        self.star(Point::new(t))
    }

    /// `a = A'` at a point, if available.
    pub fn density(&self, p: Point) -> Option<f64> {
        match &self.source {
            ShapeSource::Model(m) => Some(m.density_deviation(p) / self.divisor),
            ShapeSource::Custom { density, .. } => density.as_ref().map(|d| d(p) / self.divisor),
        }
    }
}

const SCAN_LOGIT: f64 = 45.0;
const SCAN_POINTS: usize = 4001;

/// Total variation of a continuous `D` on (0, 1) with `D(0+) = D(1-) = 0`,
/// i.e. `integral of |D'|`.
///
/// `D` is tabulated on a logit grid over `[-45, 45]`; between grid points it
/// is taken as monotone, and every interior turning point is refined by
/// golden-section search. Beyond the grid `D` is taken as monotone towards
/// its zero limit.
pub(crate) fn total_variation(d: &dyn Fn(Point) -> f64) -> f64 {
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| -SCAN_LOGIT + 2.0 * SCAN_LOGIT * k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| d(Point::from_logit(x))).collect();
    let mut tv = ys[0].abs() + ys[SCAN_POINTS - 1].abs();
    for k in 1..SCAN_POINTS {
        tv += (ys[k] - ys[k - 1]).abs();
    }
    for k in 1..SCAN_POINTS - 1 {
        let left = ys[k] - ys[k - 1];
        let right = ys[k + 1] - ys[k];
        if left * right < 0.0 {
            let sign = if left > 0.0 { 1.0 } else { -1.0 };
            let (_, peak) = golden_max(|x| sign * d(Point::from_logit(x)), xs[k - 1], xs[k + 1], 1e-12);
            // the path detours from ys[k] to the true peak and back
            tv += 2.0 * (peak - sign * ys[k]).max(0.0);
        }
    }
    tv
}

/// Maximizes a unimodal `f` on `[a, b]`; returns `(argmax, max)`.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    let (fa, fb) = (f(a), f(b));
    let mut best = (c, fc);
    for cand in [(d, fd), (a, fa), (b, fb)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// The local alternative `t + theta A(t)` for a model's normalized shape.
///
/// Since the model itself is `t + theta_j A(t)` with `theta_j = ||h - 1||_1`,
/// the path is the mixture `(1 - w) U + w H` with weight `w = theta /
/// theta_j`, and is a distribution function for `w <= 1`.
#[derive(Debug, Clone)]
pub struct LocalPath {
    shape: ShapeFunction,
    model: AlternativeModel,
    theta: f64,
}

impl LocalPath {
    pub fn new(model: &AlternativeModel, theta: f64) -> Result<Self> {
        let shape = ShapeFunction::from_model(model)?;
        let weight = theta / shape.theta_norm();
        if !(theta > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                reason: "must lie in (0, theta_j] so that the path is a mixture",
            });
        }
        let path = Self {
            model: *model,
            shape,
            theta,
        };
        path.check_monotone()?;
        Ok(path)
    }

    /// The path with mixing weight `w` in (0, 1].
    pub fn with_mixing_weight(model: &AlternativeModel, w: f64) -> Result<Self> {
        let theta = ShapeFunction::from_model(model)?.theta_norm() * w;
        Self::new(model, theta)
    }

    fn check_monotone(&self) -> Result<()> {
        let mut prev = 0.0;
        for k in 1..2000 {
            let x = -30.0 + 60.0 * k as f64 / 2000.0;
            let v = self.cdf_at(Point::from_logit(x));
            if v < prev - 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "theta",
                    value: self.theta,
                    reason: "path distribution function is not monotone",
                });
            }
            prev = v;
        }
        Ok(())
    }

    pub fn model(&self) -> &AlternativeModel {
        &self.model
    }

    pub fn shape(&self) -> &ShapeFunction {
        &self.shape
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mixing_weight(&self) -> f64 {
        self.theta / self.shape.theta_norm()
    }

    /// `t + theta A(t)`.
    pub fn cdf_at(&self, p: Point) -> f64 {
        p.t + self.theta * self.shape.value(p)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.cdf_at(Point::new(t))
    }

    /// `n` sorted draws.
    pub fn sample<R: RandomSource + ?Sized>(&self, n: usize, rng: &mut R) -> NullSample {
        let mut v = Vec::with_capacity(n);
        self.fill_sample(&mut v, n, rng);
        NullSample::from_sorted_unchecked(v)
    }

    pub fn fill_sample<R: RandomSource + ?Sized>(&self, out: &mut Vec<f64>, n: usize, rng: &mut R) {
        let w = self.mixing_weight();
        out.clear();
        for _ in 0..n {
            let t = if rng.bernoulli(w) {
                self.model.sample_one(rng)
            } else {
                rng.uniform().clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP)
            };
            out.push(t);
        }
        out.sort_unstable_by(f64::total_cmp);
    }
}
