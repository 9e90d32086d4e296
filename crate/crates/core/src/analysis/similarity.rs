//! Self-similarity residuals of driving functions.

use crate::error::{invalid, Error, Result};
use crate::loewner::{Driver, DrivingFunction};

/// `sup_t |a λ(t / b) - λ(t)|` for `a = value_factor`, `b = time_factor`.
///
/// The sup runs over the samples `t_k` and the rescaled samples `b t_k` inside the domain.
pub fn self_similarity_residual(lambda: &DrivingFunction, value_factor: f64, time_factor: f64) -> Result<f64> {
    if !(time_factor > 1.0) || !time_factor.is_finite() || !value_factor.is_finite() {
        return Err(invalid(format!("need time factor > 1, got ({value_factor}, {time_factor})")));
    }
    let horizon = lambda.horizon();
    let inner = lambda.times().partition_point(|&t| t * time_factor <= horizon);
    if inner < 2 {
        return Err(Error::InsufficientOverlap(format!(
            "fewer than two samples in [0, {}]",
            horizon / time_factor
        )));
    }
    let gap = |t: f64| (value_factor * lambda.value(t / time_factor) - lambda.value(t)).abs();
    let outer = lambda.times().iter().map(|&t| gap(t));
    let rescaled = lambda.times()[..inner].iter().map(|&t| gap(t * time_factor));
    Ok(outer.chain(rescaled).fold(0.0, f64::max))
}

/// Residual divided by the oscillation of `lambda`.
pub fn relative_self_similarity(lambda: &DrivingFunction, value_factor: f64, time_factor: f64) -> Result<f64> {
    let osc = lambda.oscillation();
    if !(osc > 0.0) {
        return Err(invalid("constant driver has no relative residual"));
    }
    Ok(self_similarity_residual(lambda, value_factor, time_factor)? / osc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_is_exactly_self_similar() {
        let d = DrivingFunction::from_fn(f64::sqrt, 1.0, 900).unwrap();
        let r = self_similarity_residual(&d, 3.0, 9.0).unwrap();
        assert!(r < 0.03, "{r}");
        let fine = DrivingFunction::from_fn(f64::sqrt, 1.0, 9000).unwrap();
        assert!(self_similarity_residual(&fine, 3.0, 9.0).unwrap() < r);
    }

    #[test]
    fn linear_driver_has_known_residual() {
        // 3 (t/9) - t = -2t/3
        let d = DrivingFunction::from_fn(|t| t, 1.0, 10).unwrap();
        let r = self_similarity_residual(&d, 3.0, 9.0).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_factors() {
        let d = DrivingFunction::from_fn(|t| t, 1.0, 10).unwrap();
        assert!(self_similarity_residual(&d, 3.0, 1.0).is_err());
        assert!(matches!(self_similarity_residual(&d, 3.0, 100.0), Err(Error::InsufficientOverlap(_))));
    }
}
