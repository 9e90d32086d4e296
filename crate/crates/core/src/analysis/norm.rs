//! Sampled Lip(1/2) norm estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::loewner::DrivingFunction;

/// Default pair budget for [`lip_norm_estimate`].
pub const DEFAULT_PAIR_BUDGET: u64 = 50_000_000;

/// Lower bound for `sup |λ(b) - λ(a)| / √(b - a)` over sample pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub estimate: f64,
    /// Sample times attaining the estimate.
    pub witness: (f64, f64),
    /// `(index lag, sup ratio)`: the band `[lag, 2 lag)` in exhaustive mode, the exact lag
    /// otherwise.
    pub scale_profile: Vec<(usize, f64)>,
    pub exhaustive: bool,
}

#[derive(Clone, Copy)]
struct Best {
    ratio: f64,
    a: usize,
    b: usize,
}

impl Best {
    const NONE: Best = Best { ratio: 0.0, a: 0, b: 0 };

    fn max(self, other: Best) -> Best {
        // ties keep the later right endpoint
        if other.ratio > self.ratio || (other.ratio == self.ratio && other.b > self.b) {
            other
        } else {
            self
        }
    }
}

fn ratio(t: &[f64], v: &[f64], a: usize, b: usize) -> f64 {
    (v[b] - v[a]).abs() / (t[b] - t[a]).sqrt()
}

/// Estimates the Lip(1/2) norm from the samples of `lambda`.
///
/// All pairs are visited when `n² ≤ pair_budget`; otherwise every pair at each lag
/// `2^k` is visited. Either way the result is a lower bound for the true norm.
pub fn lip_norm_estimate(lambda: &DrivingFunction, pair_budget: u64) -> NormReport {
    let (t, v) = (lambda.times(), lambda.values());
    let n = t.len();
    let exhaustive = (n as u64).saturating_mul(n as u64) <= pair_budget;
    let bands = usize::BITS - (n - 1).leading_zeros();

    let profile: Vec<Best> = if exhaustive {
        (0..n - 1)
            .into_par_iter()
            .map(|a| {
                let mut local = vec![Best::NONE; bands as usize];
                for b in a + 1..n {
                    let lag = b - a;
                    let band = (usize::BITS - 1 - lag.leading_zeros()) as usize;
                    local[band] = local[band].max(Best { ratio: ratio(t, v, a, b), a, b });
                }
                local
            })
            .reduce(
                || vec![Best::NONE; bands as usize],
                |x, y| x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect(),
            )
    } else {
        (0..bands)
            .map(|k| {
                let lag = 1usize << k;
                (0..n - lag)
                    .into_par_iter()
                    .map(|a| Best { ratio: ratio(t, v, a, a + lag), a, b: a + lag })
                    .reduce(|| Best::NONE, Best::max)
            })
            .collect()
    };

    let best = profile.iter().copied().fold(Best::NONE, Best::max);
    NormReport {
        estimate: best.ratio,
        witness: (t[best.a], t[best.b]),
        scale_profile: profile.iter().enumerate().map(|(k, b)| (1usize << k, b.ratio)).collect(),
        exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::{sample_uniform, ClosedForm, Driver};

    #[test]
    fn constant_driver_has_zero_norm() {
        let d = DrivingFunction::constant(2.5, 3.0).unwrap();
        assert_eq!(lip_norm_estimate(&d, DEFAULT_PAIR_BUDGET).estimate, 0.0);
    }

    #[test]
    fn bubble_norm_is_four_at_the_endpoint() {
        let d = sample_uniform(&ClosedForm::Bubble { c: 4.0 }, 2000).unwrap();
        let r = lip_norm_estimate(&d, DEFAULT_PAIR_BUDGET);
        assert!(r.exhaustive);
        assert!((r.estimate - 4.0).abs() < 1e-6, "{}", r.estimate);
        assert_eq!(r.witness.1, 1.0);
        let max = r.scale_profile.iter().map(|p| p.1).fold(0.0, f64::max);
        assert_eq!(max, r.estimate);
        let (a, b) = r.witness;
        assert_eq!((d.value(b) - d.value(a)).abs() / (b - a).sqrt(), r.estimate);
    }

    #[test]
    fn sqrt_ray_norm_is_k_at_the_origin() {
        let d = sample_uniform(&ClosedForm::SqrtRay { k: 2.5, horizon: 1.0 }, 1000).unwrap();
        let r = lip_norm_estimate(&d, 100);
        assert!(!r.exhaustive);
        assert!((r.estimate - 2.5).abs() < 1e-9);
        assert_eq!(r.witness.0, 0.0);
    }

    #[test]
    fn density_doubling_keeps_the_bubble_estimate() {
        let a = lip_norm_estimate(&sample_uniform(&ClosedForm::Bubble { c: 4.0 }, 1000).unwrap(), u64::MAX);
        let b = lip_norm_estimate(&sample_uniform(&ClosedForm::Bubble { c: 4.0 }, 2000).unwrap(), u64::MAX);
        assert!((a.estimate - b.estimate).abs() < 1e-6);
    }
}
