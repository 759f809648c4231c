//! Special functions: the standard normal distribution, the regularized
//! incomplete gamma function and the symmetric Subbotin distribution.
//!
//! `erf`/`erfc` and the log-gamma function come from `libm`; everything that
//! sits on top of them lives here.

#![allow(clippy::excessive_precision)]

use core::f64::consts::{PI, SQRT_2};

/// `ln(sqrt(2 pi))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x - LN_SQRT_2PI)
}

/// Logarithm of the standard normal density.
#[inline]
pub fn ln_norm_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Standard normal distribution function, accurate in relative terms in the
/// lower tail down to the underflow threshold.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)` without cancellation.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

// Wichura (1988), algorithm AS 241 (PPND16).
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_854_561,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// AS 241 for the lower tail, `p <= 0.5` is not required.
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = libm::sqrt(-libm::log(r));
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Inverse of the lower-tail normal probability `p` for `p <= 1/2`, polished
/// by one Halley step against `erfc`.
fn lower_quantile(p: f64) -> f64 {
    let x = ppnd16(p);
    if !x.is_finite() {
        return x;
    }
    let e = norm_cdf(x) - p;
    let u = e * libm::sqrt(2.0 * PI) * libm::exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Standard normal quantile function `Phi^{-1}(p)`.
///
/// Returns `-inf` at `p = 0`, `+inf` at `p = 1` and NaN outside `[0, 1]`.
pub fn norm_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p <= 0.5 {
        lower_quantile(p)
    } else {
        -lower_quantile(1.0 - p)
    }
}

/// `Phi^{-1}(1 - q)` computed from the upper-tail probability `q` directly,
/// so that values of `q` far below machine epsilon keep full precision.
pub fn norm_quantile_upper(q: f64) -> f64 {
    -norm_quantile(q)
}

/// Natural logarithm of the gamma function for positive arguments.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Gamma function.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_TINY: f64 = 1e-300;
const GAMMA_MAX_ITER: usize = 10_000;

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    libm::exp(-x + a * libm::log(x) - ln_gamma(a))
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / GAMMA_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < GAMMA_TINY {
            d = GAMMA_TINY;
        }
        c = b + an / c;
        if c.abs() < GAMMA_TINY {
            c = GAMMA_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

/// Normalizing constant of the symmetric Subbotin density
/// `C_gamma exp(-|x|^gamma / gamma)`: `gamma^(1 - 1/gamma) / (2 Gamma(1/gamma))`.
pub fn subbotin_norm_const(shape: f64) -> f64 {
    libm::exp(subbotin_ln_norm_const(shape))
}

/// Logarithm of [`subbotin_norm_const`].
pub fn subbotin_ln_norm_const(shape: f64) -> f64 {
    (1.0 - 1.0 / shape) * libm::log(shape) - core::f64::consts::LN_2 - ln_gamma(1.0 / shape)
}

/// Log density of the symmetric Subbotin law.
pub fn subbotin_ln_pdf(x: f64, shape: f64) -> f64 {
    subbotin_ln_norm_const(shape) - libm::pow(x.abs(), shape) / shape
}

/// Lower tail `P(X <= -|x|)` of the symmetric Subbotin law; `|X|^g / g` is
/// Gamma(1/g, 1) distributed.
pub fn subbotin_tail(x: f64, shape: f64) -> f64 {
    let y = libm::pow(x.abs(), shape) / shape;
    0.5 * gamma_q(1.0 / shape, y)
}

/// Subbotin distribution function.
pub fn subbotin_cdf(x: f64, shape: f64) -> f64 {
    let tail = subbotin_tail(x, shape);
    if x <= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Kolmogorov limiting distribution function
/// `K(x) = 1 - 2 sum_{j>=1} (-1)^(j-1) exp(-2 j^2 x^2)`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 0.3 {
        // theta-function form, converges fast for small x
        let mut s = 0.0;
        for k in 1..=50 {
            let m = (2 * k - 1) as f64;
            s += libm::exp(-m * m * PI * PI / (8.0 * x * x));
        }
        return libm::sqrt(2.0 * PI) / x * s;
    }
    1.0 - kolmogorov_sf(x)
}

/// Upper tail `1 - K(x)` of the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.3 {
        return 1.0 - kolmogorov_cdf(x);
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = libm::exp(-2.0 * jf * jf * x * x);
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    2.0 * s
}

/// Upper `alpha` point of the Kolmogorov distribution, by bisection on
/// [`kolmogorov_sf`].
pub fn kolmogorov_quantile_upper(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2_f64, 10.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn normal_cdf_reference_values() {
        // reference values from a 50-digit evaluation
        assert!((norm_cdf(-2.0) - 0.022_750_131_948_179_207).abs() < 1e-16);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!(rel(norm_cdf(-10.0), 7.619_853_024_160_527e-24) < 1e-13);
        assert!(rel(norm_cdf(-37.0), 5.725_571_222_524_577e-300) < 1e-12);
        assert!(rel(norm_sf(8.0), 6.220_960_574_271_785e-16) < 1e-13);
    }

    #[test]
    fn quantile_reference_values() {
        assert!((norm_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((norm_quantile(0.5)).abs() < 1e-16);
        assert!(rel(norm_quantile(1e-10), -6.361_340_902_404_056) < 1e-14);
        assert!(rel(norm_quantile(1e-300), -37.047_096_299_361_2) < 1e-13);
        assert!(rel(norm_quantile_upper(1e-20), 9.262_340_089_798_408) < 1e-13);
        assert_eq!(norm_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(norm_quantile(1.0), f64::INFINITY);
        assert!(norm_quantile(1.5).is_nan());
    }

    #[test]
    fn quantile_round_trip() {
        for k in 1..2000 {
            let p = k as f64 / 2000.0;
            let x = norm_quantile(p);
            let back = if p < 0.5 { norm_cdf(x) } else { 1.0 - norm_sf(x) };
            assert!((back - p).abs() < 1e-15, "p={p} back={back}");
        }
        for e in 1..300 {
            let p = libm::pow(10.0, -(e as f64));
            // relative error of Phi at x is about x^2 ulp
            assert!(rel(norm_cdf(norm_quantile(p)), p) < 3e-13, "p={p}");
        }
    }

    #[test]
    fn incomplete_gamma_matches_closed_forms() {
        // Q(1/2, x) = erfc(sqrt x); P(1, x) = 1 - exp(-x)
        for &x in &[1e-6, 0.01, 0.3, 1.0, 2.5, 7.0, 30.0, 200.0] {
            let q = gamma_q(0.5, x);
            let expect = libm::erfc(libm::sqrt(x));
            assert!(rel(q, expect) < 1e-13, "x={x}: {q} vs {expect}");
            let p = gamma_p(1.0, x);
            assert!(rel(p, -libm::expm1(-x)) < 1e-13, "x={x}");
        }
        assert_eq!(gamma_p(2.0, 0.0), 0.0);
        assert_eq!(gamma_q(2.0, 0.0), 1.0);
    }

    #[test]
    fn subbotin_with_shape_two_is_standard_normal() {
        assert!(rel(subbotin_norm_const(2.0), 1.0 / libm::sqrt(2.0 * PI)) < 1e-14);
        for &x in &[-6.0, -2.0, -0.3, 0.0, 0.7, 3.0] {
            assert!((subbotin_cdf(x, 2.0) - norm_cdf(x)).abs() < 1e-14, "x={x}");
        }
        // shape 1 is the Laplace law
        assert!(rel(subbotin_cdf(-2.0, 1.0), 0.5 * libm::exp(-2.0)) < 1e-14);
    }

    #[test]
    fn kolmogorov_quantiles() {
        // classical tabulated values
        assert!((kolmogorov_quantile_upper(0.05) - 1.358_098_6).abs() < 1e-6);
        assert!((kolmogorov_quantile_upper(0.01) - 1.627_624_1).abs() < 1e-6);
        assert!((kolmogorov_cdf(0.29) + kolmogorov_sf(0.29) - 1.0).abs() < 1e-15);
        assert!((kolmogorov_cdf(0.3) - (1.0 - kolmogorov_sf(0.3))).abs() < 1e-12);
    }
}
