//! Counter-based random numbers.
//!
//! [`Philox4x32`] is the Philox-4x32-10 block function of Salmon et al.
//! (2011). A stream is addressed by a 64-bit key and a 64-bit stream index;
//! the remaining 64 counter bits count blocks inside the stream. Any
//! replicate of any experiment can therefore be regenerated on its own,
//! which is what makes parallel Monte Carlo runs independent of scheduling.

use crate::special::norm_quantile;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

/// Ten rounds of Philox-4x32 applied to `ctr` under `key`.
#[inline]
pub fn philox4x32_10(mut ctr: [u32; 4], mut key: [u32; 2]) -> [u32; 4] {
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(PHILOX_W0);
            key[1] = key[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// SplitMix64 finalizer; a bijective 64-bit mixer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines two words into a key; not symmetric in its arguments.
#[inline]
pub fn mix64(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b).rotate_left(17))
}

/// A Philox-4x32-10 stream.
#[derive(Debug, Clone)]
pub struct Philox4x32 {
    key: [u32; 2],
    ctr: [u32; 4],
    buf: [u32; 4],
    pos: usize,
}

impl Philox4x32 {
    /// Stream number `stream` under `key`, positioned at block 0.
    pub fn new(key: u64, stream: u64) -> Self {
        Self {
            key: [key as u32, (key >> 32) as u32],
            ctr: [0, 0, stream as u32, (stream >> 32) as u32],
            buf: [0; 4],
            pos: 4,
        }
    }

    /// Stream for replicate `replicate` of the experiment identified by
    /// `(seed, purpose)`.
    pub fn for_replicate(seed: u64, purpose: u64, replicate: u64) -> Self {
        Self::new(mix64(seed, purpose), replicate)
    }

    fn refill(&mut self) {
        self.buf = philox4x32_10(self.ctr, self.key);
        let block = (self.ctr[0] as u64 | ((self.ctr[1] as u64) << 32)).wrapping_add(1);
        self.ctr[0] = block as u32;
        self.ctr[1] = (block >> 32) as u32;
        self.pos = 0;
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }
}

impl RandomSource for Philox4x32 {
    #[inline]
    fn next_u64(&mut self) -> u64 {
        let lo = self.next_u32() as u64;
        let hi = self.next_u32() as u64;
        lo | (hi << 32)
    }
}

/// Source of uniform 64-bit words plus the derived variates used by the
/// samplers.
pub trait RandomSource {
    fn next_u64(&mut self) -> u64;

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    #[inline]
    fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal variate by inversion.
    #[inline]
    fn std_normal(&mut self) -> f64 {
        norm_quantile(self.uniform())
    }

    /// Standard exponential variate.
    #[inline]
    fn exponential(&mut self) -> f64 {
        -libm::log(self.uniform())
    }

    #[inline]
    fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Gamma(shape, 1) variate (Marsaglia and Tsang 2000); shapes below one
    /// use the `G(a+1) U^(1/a)` boost.
    fn gamma(&mut self, shape: f64) -> f64 {
        if shape < 1.0 {
            let g = self.gamma(shape + 1.0);
            // U^(1/a) in log space keeps tiny shapes from underflowing early
            return g * libm::exp(libm::log(self.uniform()) / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / libm::sqrt(9.0 * d);
        loop {
            let x = self.std_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
                return d * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // known-answer vectors distributed with Random123
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0; 4], [0; 2]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = Philox4x32::for_replicate(7, 1, 3);
        let mut b = Philox4x32::for_replicate(7, 1, 3);
        let mut c = Philox4x32::for_replicate(7, 1, 4);
        let xa: Vec<u64> = (0..10).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..10).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..10).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn uniform_moments() {
        let mut r = Philox4x32::new(42, 0);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let u = r.uniform();
            assert!(u > 0.0 && u < 1.0);
            s += u;
            s2 += u * u;
        }
        let m = s / n as f64;
        assert!((m - 0.5).abs() < 0.003);
        assert!((s2 / n as f64 - m * m - 1.0 / 12.0).abs() < 0.002);
    }

    #[test]
    fn gamma_moments() {
        let mut r = Philox4x32::new(9, 0);
        for &a in &[0.25, 0.5, 1.0, 3.0] {
            let n = 200_000;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let g = r.gamma(a);
                s += g;
                s2 += g * g;
            }
            let m = s / n as f64;
            let v = s2 / n as f64 - m * m;
            assert!((m - a).abs() < 6.0 * libm::sqrt(a / n as f64), "a={a} m={m}");
            assert!((v / a - 1.0).abs() < 0.05, "a={a} v={v}");
        }
    }
}
