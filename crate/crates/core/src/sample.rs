//! Sorted samples on the open unit interval.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Largest double below one.
pub const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Nondecreasing observations, each strictly inside (0, 1), at least one.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSample {
    values: Vec<f64>,
}

impl NullSample {
    /// Validates and sorts arbitrary-order values. Ties are accepted.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Validates values that the caller claims are already sorted.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        validate(&values)?;
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: f64::NAN,
                reason: "not sorted",
            });
        }
        Ok(Self { values })
    }

    /// Skips validation. The caller guarantees sortedness, length at least
    /// one and values in (0, 1); samplers in this crate use it.
    pub fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(validate(&values).is_ok());
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }

    /// `n` sorted uniforms from normalized exponential spacings, O(n) with no
    /// sort.
    pub fn uniform<R: RandomSource + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut values = Vec::with_capacity(n);
        fill_sorted_uniform(&mut values, n, rng);
        Self { values }
    }
}

/// Writes `n` sorted uniforms into `out` (cleared first). Reusing the buffer
/// keeps the Monte Carlo loops allocation free.
pub fn fill_sorted_uniform<R: RandomSource + ?Sized>(out: &mut Vec<f64>, n: usize, rng: &mut R) {
    out.clear();
    let mut s = 0.0;
    for _ in 0..n {
        s += rng.exponential();
        out.push(s);
    }
    let total = s + rng.exponential();
    let inv = 1.0 / total;
    for v in out.iter_mut() {
        *v = (*v * inv).clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP);
    }
}

fn validate(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value <= 0.0 || value >= 1.0 {
            return Err(Error::OutOfUnitInterval { index, value });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Philox4x32;

    #[test]
    fn rejects_bad_values() {
        assert_eq!(NullSample::new(vec![]), Err(Error::EmptySample));
        assert!(matches!(
            NullSample::new(vec![0.2, 1.0]),
            Err(Error::OutOfUnitInterval { index: 1, .. })
        ));
        assert!(matches!(
            NullSample::new(vec![0.0]),
            Err(Error::OutOfUnitInterval { index: 0, .. })
        ));
        assert!(matches!(
            NullSample::new(vec![0.3, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(NullSample::from_sorted(vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn sorts_and_keeps_ties() {
        let s = NullSample::new(vec![0.7, 0.2, 0.7]).unwrap();
        assert_eq!(s.values(), &[0.2, 0.7, 0.7]);
    }

    #[test]
    fn spacings_sampler_is_uniform() {
        // pooled order statistics of many small samples must be uniform
        let mut rng = Philox4x32::new(3, 0);
        let mut pooled = Vec::new();
        let mut buf = Vec::new();
        for _ in 0..20_000 {
            fill_sorted_uniform(&mut buf, 5, &mut rng);
            assert!(buf.windows(2).all(|w| w[0] <= w[1]));
            pooled.extend_from_slice(&buf);
        }
        pooled.sort_unstable_by(f64::total_cmp);
        let n = pooled.len() as f64;
        let d = pooled
            .iter()
            .enumerate()
            .map(|(i, &u)| f64::max((i as f64 + 1.0) / n - u, u - i as f64 / n))
            .fold(0.0, f64::max);
        assert!(d * n.sqrt() < 1.95, "KS distance {d}");
    }
}
