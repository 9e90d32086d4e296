//! Time-changed capture dynamics.
//!
//! For a driver normalized so that capture happens at `t = 1`, the substitution
//! `s = -ln(1 - t)` and `x_s = g_t(x) / √(1 - t)` turn the forward equation into
//! `∂x = -(x² - σx + 4) / (2(σ - x))` with `σ(s) = e^{s/2} λ(1 - e^{-s})`.

mod flow;
mod lemma;
mod scan;

pub use flow::{flow_x, FlowOptions, FlowPath, FlowState, MonotoneSegment, Trend};
pub use lemma::{
    drift, drift_minimum, lemma_interval_constants, lemma_tail_delta, phase_inequality_margin, phase_margin_check,
    phase_margin_unfactored, verify_lemma_interval, LemmaConstants, LemmaReport, PhaseCheck,
};
pub use scan::{capture_scan, CaptureRecord, CaptureScan};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::loewner::{Driver, DrivingFunction};

/// `u ↦ (λ(Tu) - λ(T)) / √T` on `[0, 1]`.
pub fn normalize_at_capture(lambda: &DrivingFunction, capture_time: f64) -> Result<DrivingFunction> {
    let horizon = lambda.horizon();
    if !(capture_time > 0.0) || capture_time > horizon {
        return Err(invalid(format!("capture time must lie in (0, {horizon}], got {capture_time}")));
    }
    let end = lambda.value(capture_time);
    let root = capture_time.sqrt();
    let k = lambda.times().partition_point(|&t| t < capture_time);
    let mut times: Vec<f64> = lambda.times()[..k].iter().map(|t| t / capture_time).collect();
    let mut values: Vec<f64> = lambda.values()[..k].iter().map(|v| (v - end) / root).collect();
    times.push(1.0);
    values.push(0.0);
    DrivingFunction::with_interpolation(times, values, lambda.interpolation())
}

/// `σ(s) = e^{s/2} λ(1 - e^{-s})` for a driver on `[0, 1]`.
pub fn sigma_of(lambda: &impl Driver, s: f64) -> f64 {
    let u = (-s).exp();
    lambda.value_before_end(u) / u.sqrt()
}

/// Roots of `x² - σx + 4`; both are 2 when `σ < 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoints {
    /// Attracting.
    pub a: f64,
    /// Repelling.
    pub b: f64,
}

pub fn fixed_points(sigma: f64) -> FixedPoints {
    if sigma < 4.0 {
        return FixedPoints { a: 2.0, b: 2.0 };
    }
    let root = ((sigma - 4.0) * (sigma + 4.0)).sqrt();
    let a = (sigma + root) / 2.0;
    // 4 / a avoids cancellation in (σ - root) / 2
    FixedPoints { a, b: 4.0 / a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::{sample_uniform, ClosedForm};

    #[test]
    fn normalization_examples() {
        let d = sample_uniform(&ClosedForm::Bubble { c: 4.0 }, 100).unwrap();
        let n = normalize_at_capture(&d, 1.0).unwrap();
        assert_eq!(n.times(), d.times());
        assert_eq!(n.values(), d.values());

        let c = DrivingFunction::constant(2.0, 3.0).unwrap();
        let n = normalize_at_capture(&c, 1.7).unwrap();
        assert_eq!(n.horizon(), 1.0);
        assert!(n.values().iter().all(|&v| v == 0.0));

        let d = DrivingFunction::from_fn(|t| 4.0 * (4.0 - t).max(0.0).sqrt(), 4.0, 400).unwrap();
        let n = normalize_at_capture(&d, 4.0).unwrap();
        for (&u, &v) in n.times().iter().zip(n.values()) {
            assert!((v - 4.0 * (1.0 - u).max(0.0).sqrt()).abs() < 1e-12);
        }
        assert!(normalize_at_capture(&d, 0.0).is_err());
        assert!(normalize_at_capture(&d, 5.0).is_err());
    }

    #[test]
    fn sigma_examples() {
        let b = ClosedForm::Bubble { c: 4.5 };
        for s in [0.0, 0.3, 5.0, 40.0] {
            assert!((sigma_of(&b, s) - 4.5).abs() < 1e-12);
        }
        assert_eq!(sigma_of(&ClosedForm::Constant { c: 0.0, horizon: 1.0 }, 3.0), 0.0);
        let d = DrivingFunction::from_fn(|t| 1.0 + t, 1.0, 10).unwrap();
        assert_eq!(sigma_of(&d, 0.0), 1.0);
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_points(5.0), FixedPoints { a: 4.0, b: 1.0 });
        assert_eq!(fixed_points(4.0), FixedPoints { a: 2.0, b: 2.0 });
        assert_eq!(fixed_points(3.0), FixedPoints { a: 2.0, b: 2.0 });
    }

    proptest::proptest! {
        #[test]
        fn fixed_point_algebra(sigma in 4.0f64..1e3) {
            let FixedPoints { a, b } = fixed_points(sigma);
            proptest::prop_assert!((a * b - 4.0).abs() < 1e-12);
            proptest::prop_assert!((a + b - sigma).abs() < 1e-12 * sigma);
            proptest::prop_assert!(a >= b);
        }
    }
}
