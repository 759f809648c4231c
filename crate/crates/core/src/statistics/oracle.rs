//! Brute-force reference evaluations, used to check the closed forms.
//!
//! The grid oracles evaluate `sqrt(n) |F_n(t) - t| / [t(1-t)]^e` on a grid
//! and return an interval `[lower, upper]` that provably contains the
//! supremum over the domain:
//!
//! * `lower` is the largest grid value (a grid can only undershoot);
//! * on a grid cell `[a, b]` where `F_n` jumps from `c_a` to `c_b`, every
//!   value is at most `max((c_b - a)/w(a), (b - c_a)/w(b))`, because
//!   `(c - t)/w` decreases and `(t - c)/w` increases where positive (the
//!   monotonicity argument of the parent module). Cells without a jump
//!   attain their supremum at a grid point. `upper` is the largest of these
//!   cell bounds and `lower`.
//!
//! `upper - lower` is the documented accuracy of one evaluation. It scales
//! like `sqrt(n) h L`, with `h` the pitch of the cell holding the maximizing
//! jump and `L = 1/w + tau |c - t| / (t (1 - t) w)` the local slope.
//!
//! On the open domain (0, 1) the grid stops at `1e-12` and `1 - 1e-12`.

use alloc::vec::Vec;

use crate::quad::integrate;

/// Smallest grid coordinate on the full domain.
pub const GRID_EDGE: f64 = 1e-12;

/// A weight exponent and a closed domain `[lo, hi]`; `lo = 0`, `hi = 1`
/// stand for the open unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTarget {
    pub exponent: f64,
    pub lo: f64,
    pub hi: f64,
}

impl OracleTarget {
    pub fn full(exponent: f64) -> Self {
        Self {
            exponent,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn restricted(exponent: f64, kappa: f64) -> Self {
        Self {
            exponent,
            lo: kappa,
            hi: 1.0 - kappa,
        }
    }
}

/// Enclosure of a supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleBound {
    pub lower: f64,
    pub upper: f64,
}

impl OracleBound {
    pub fn accuracy(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn relative_accuracy(&self) -> f64 {
        if self.lower > 0.0 {
            self.accuracy() / self.lower
        } else {
            f64::INFINITY
        }
    }

    /// True when `value` lies in the enclosure up to `slack` (relative).
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        let tol = slack * self.upper.abs().max(1.0);
        value >= self.lower - tol && value <= self.upper + tol
    }
}

fn inv_weight(t: f64, exponent: f64) -> f64 {
    if exponent == 0.0 {
        1.0
    } else {
        libm::pow(t * (1.0 - t), -exponent)
    }
}

/// Two fifths uniformly spaced points, three fifths uniformly spaced in
/// `log(t/(1-t))` down to [`GRID_EDGE`], merged and sorted. The uniform part
/// bounds the absolute pitch (what the unweighted sup needs), the logit
/// part the relative pitch near the ends (what the weighted sups need).
pub fn base_grid(size: usize) -> Vec<f64> {
    let m1 = size * 2 / 5;
    let m2 = size - m1;
    let mut pts = Vec::with_capacity(size);
    for k in 0..m1 {
        pts.push((k as f64 + 0.5) / m1 as f64);
    }
    let edge = libm::log((1.0 - GRID_EDGE) / GRID_EDGE);
    for k in 0..m2 {
        let x = -edge + 2.0 * edge * k as f64 / (m2 - 1).max(1) as f64;
        pts.push(1.0 / (1.0 + libm::exp(-x)));
    }
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Fixed-grid oracle; the grid and its weights are computed once and reused
/// across samples.
#[derive(Debug, Clone)]
pub struct GridOracle {
    points: Vec<f64>,
    weights: Vec<(f64, Vec<f64>)>,
}

impl GridOracle {
    /// A grid of about `size` points, with inverse weights precomputed for
    /// each listed exponent.
    pub fn plain(size: usize, exponents: &[f64]) -> Self {
        let points = base_grid(size);
        let weights = exponents
            .iter()
            .map(|&e| (e, points.iter().map(|&t| inv_weight(t, e)).collect()))
            .collect();
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Encloses the supremum for each target. `u` is sorted in (0, 1).
    ///
    /// Panics if a target exponent was not precomputed.
    pub fn evaluate(&self, u: &[f64], targets: &[OracleTarget]) -> Vec<OracleBound> {
        self.evaluate_with(u, targets, &[])
    }

    /// Like [`GridOracle::evaluate`], with two extra points per order
    /// statistic `U` at `U -+ offset min(U, 1-U)`: a grid refined near the
    /// jumps but not through them. Jump cells then have relative width
    /// `2 offset`.
    pub fn evaluate_near_jumps(&self, u: &[f64], targets: &[OracleTarget], offset: f64) -> Vec<OracleBound> {
        let mut extra = Vec::with_capacity(2 * u.len());
        for &x in u {
            let h = offset * x.min(1.0 - x);
            extra.push(x - h);
            extra.push(x + h);
        }
        extra.sort_unstable_by(f64::total_cmp);
        self.evaluate_with(u, targets, &extra)
    }

    fn evaluate_with(&self, u: &[f64], targets: &[OracleTarget], extra: &[f64]) -> Vec<OracleBound> {
        targets
            .iter()
            .map(|tg| {
                let w = &self
                    .weights
                    .iter()
                    .find(|(e, _)| *e == tg.exponent)
                    .expect("exponent not precomputed")
                    .1;
                let i0 = self.points.partition_point(|&t| t <= tg.lo);
                let i1 = self.points.partition_point(|&t| t < tg.hi);
                let inside = |t: f64| t > tg.lo && t < tg.hi;
                let mut ex = extra.iter().copied().filter(|&t| inside(t)).peekable();
                let mut sweep = Sweep::new(u);
                if tg.lo > 0.0 {
                    sweep.visit(tg.lo, inv_weight(tg.lo, tg.exponent));
                }
                for (&t, &iw) in self.points[i0..i1].iter().zip(&w[i0..i1]) {
                    while let Some(x) = ex.next_if(|&x| x < t) {
                        sweep.visit(x, inv_weight(x, tg.exponent));
                    }
                    sweep.visit(t, iw);
                }
                for x in ex {
                    sweep.visit(x, inv_weight(x, tg.exponent));
                }
                if tg.hi < 1.0 {
                    sweep.visit(tg.hi, inv_weight(tg.hi, tg.exponent));
                }
                sweep.finish()
            })
            .collect()
    }
}

/// Oracle on a sample-specific grid: `base` background points plus, for
/// every order statistic `U`, the points `U (1 - eps)`, `U` and `U + eps
/// min(U, 1-U)` with `eps = 1e-10`, plus the domain endpoints. Jump cells
/// have width of order `eps`, so the enclosure is tight to about `1e-10`
/// relative.
pub fn refined(u: &[f64], targets: &[OracleTarget], base: usize) -> Vec<OracleBound> {
    const EPS: f64 = 1e-10;
    let mut pts = base_grid(base);
    for &x in u {
        let h = EPS * x.min(1.0 - x);
        pts.push(x - h);
        pts.push(x);
        pts.push(x + h);
    }
    pts.sort_unstable_by(f64::total_cmp);
    pts.dedup();
    targets
        .iter()
        .map(|tg| {
            let mut sweep = Sweep::new(u);
            if tg.lo > 0.0 {
                sweep.visit(tg.lo, inv_weight(tg.lo, tg.exponent));
            }
            for &t in pts.iter().filter(|&&t| t > tg.lo && t < tg.hi) {
                sweep.visit(t, inv_weight(t, tg.exponent));
            }
            if tg.hi < 1.0 {
                sweep.visit(tg.hi, inv_weight(tg.hi, tg.exponent));
            }
            sweep.finish()
        })
        .collect()
}

/// One-target convenience wrapper over a plain grid of `10^6` points.
pub fn grid_sup_oracle(u: &[f64], exponent: f64, lo: f64, hi: f64) -> OracleBound {
    let oracle = GridOracle::plain(1_000_000, &[exponent]);
    oracle.evaluate(u, &[OracleTarget { exponent, lo, hi }])[0]
}

struct Sweep<'a> {
    u: &'a [f64],
    inv_n: f64,
    count: usize,
    prev: Option<(f64, usize, f64)>,
    lower: f64,
    upper: f64,
}

impl<'a> Sweep<'a> {
    fn new(u: &'a [f64]) -> Self {
        Self {
            u,
            inv_n: 1.0 / u.len() as f64,
            count: 0,
            prev: None,
            lower: 0.0,
            upper: 0.0,
        }
    }

    fn visit(&mut self, t: f64, iw: f64) {
        while self.count < self.u.len() && self.u[self.count] <= t {
            self.count += 1;
        }
        let f = self.count as f64 * self.inv_n;
        let v = (f - t).abs() * iw;
        self.lower = self.lower.max(v);
        if let Some((a, ca, iwa)) = self.prev {
            if ca != self.count {
                let fa = ca as f64 * self.inv_n;
                let b1 = (f - a) * iwa;
                let b2 = (t - fa) * iw;
                self.upper = self.upper.max(b1).max(b2);
            }
        }
        self.prev = Some((t, self.count, iw));
    }

    fn finish(self) -> OracleBound {
        let s = libm::sqrt(self.u.len() as f64);
        OracleBound {
            lower: s * self.lower,
            upper: s * self.upper.max(self.lower),
        }
    }
}

/// `n * integral of (F_n(t) - t)^2 / (t (1 - t))` by adaptive quadrature
/// on each interval between consecutive order statistics, where the
/// integrand is smooth and bounded. Returns `A^2`, the square of the
/// integral Anderson-Darling statistic.
pub fn ad_integral_oracle(u: &[f64]) -> f64 {
    let n = u.len();
    let nf = n as f64;
    let mut total = 0.0;
    let mut a = 0.0;
    for (i, &b) in u.iter().chain(core::iter::once(&1.0)).enumerate() {
        let c = i as f64 / nf;
        let r = integrate(
            // Kronrod nodes are interior, so t(1-t) > 0
            |t| {
                let d = c - t;
                d * d / (t * (1.0 - t))
            },
            a,
            b,
            1e-15,
            1e-14,
            10_000,
        );
        total += r.value;
        a = b;
    }
    nf * total
}
