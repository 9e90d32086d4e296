//! Driving functions.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Anything that can be evaluated as a driving function on `[0, horizon]`.
pub trait Driver: Sync {
    fn horizon(&self) -> f64;

    fn value(&self, t: f64) -> f64;

    /// Spacing of the underlying samples near `t`; zero for closed-form drivers.
    fn resolution(&self, _t: f64) -> f64 {
        0.0
    }

    /// First breakpoint strictly after `t`, if the driver has any.
    fn next_knot(&self, _t: f64) -> Option<f64> {
        None
    }

    /// `λ(T - u)`; closed forms override this to stay accurate when `u` is below the
    /// resolution of `T`.
    fn value_before_end(&self, u: f64) -> f64 {
        self.value(self.horizon() - u)
    }
}

impl<D: Driver + ?Sized> Driver for &D {
    fn horizon(&self) -> f64 {
        (**self).horizon()
    }
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn resolution(&self, t: f64) -> f64 {
        (**self).resolution(t)
    }
    fn next_knot(&self, t: f64) -> Option<f64> {
        (**self).next_knot(t)
    }
    fn value_before_end(&self, u: f64) -> f64 {
        (**self).value_before_end(u)
    }
}

impl Driver for Box<dyn Driver + Send> {
    fn horizon(&self) -> f64 {
        (**self).horizon()
    }
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn resolution(&self, t: f64) -> f64 {
        (**self).resolution(t)
    }
    fn next_knot(&self, t: f64) -> Option<f64> {
        (**self).next_knot(t)
    }
    fn value_before_end(&self, u: f64) -> f64 {
        (**self).value_before_end(u)
    }
}

/// How a sampled driver is evaluated between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Value on `(t[k-1], t[k]]` is `values[k]`.
    PiecewiseConstantRight,
    #[default]
    Linear,
}

/// A sampled driving function.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingFunction {
    times: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
}

impl DrivingFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_interpolation(times, values, Interpolation::Linear)
    }

    pub fn with_interpolation(times: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidDriver(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidDriver("need at least two samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidDriver(format!("first time must be 0, got {}", times[0])));
        }
        if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidDriver(format!(
                "times not strictly increasing at index {}",
                k + 1
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDriver(format!("non-finite value at index {k}")));
        }
        Ok(Self { times, values, interpolation })
    }

    /// Samples `driver` at the given times (which must start at 0).
    pub fn sample(driver: &impl Driver, times: Vec<f64>) -> Result<Self> {
        let values = times.iter().map(|&t| driver.value(t)).collect();
        Self::new(times, values)
    }

    /// Samples `f` on `n` uniform steps of `[0, horizon]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, horizon: f64, n: usize) -> Result<Self> {
        if n == 0 || !(horizon > 0.0) {
            return Err(invalid("need n >= 1 and a positive horizon"));
        }
        let times: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Self::new(times, values)
    }

    pub fn constant(c: f64, horizon: f64) -> Result<Self> {
        Self::new(vec![0.0, horizon], vec![c, c])
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn with_mode(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("validated non-empty")
    }

    pub fn start_value(&self) -> f64 {
        self.values[0]
    }

    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    }

    /// `t -> ±(r λ(t / r²)) + x` on `[0, r² T]`.
    pub fn transform(&self, r: f64, x: f64, reflect: bool) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid(format!("scale must be positive, got {r}")));
        }
        let sign = if reflect { -1.0 } else { 1.0 };
        let r2 = r * r;
        Ok(Self {
            times: self.times.iter().map(|t| t * r2).collect(),
            values: self.values.iter().map(|v| sign * r * v + x).collect(),
            interpolation: self.interpolation,
        })
    }

    /// Runs `self` then `next`; `next` must start where `self` ends (within `tol`).
    pub fn concat(&self, next: &DrivingFunction, tol: f64) -> Result<Self> {
        let (left, right) = (self.end_value(), next.start_value());
        if (left - right).abs() > tol {
            return Err(Error::Discontinuous { left, right });
        }
        let shift = self.horizon();
        let mut times = self.times.clone();
        let mut values = self.values.clone();
        times.extend(next.times[1..].iter().map(|t| t + shift));
        values.extend_from_slice(&next.values[1..]);
        Self::with_interpolation(times, values, self.interpolation)
    }

    /// Restriction to `[0, t_end]`, inserting an interpolated endpoint if needed.
    pub fn truncate(&self, t_end: f64) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(invalid("truncation time must be positive"));
        }
        let k = self.times.partition_point(|&t| t < t_end);
        let mut times = self.times[..k].to_vec();
        let mut values = self.values[..k].to_vec();
        if k < self.times.len() || *times.last().unwrap_or(&-1.0) < t_end {
            times.push(t_end.min(self.horizon()));
            values.push(self.value(t_end));
        }
        Self::with_interpolation(times, values, self.interpolation)
    }
}

impl Driver for DrivingFunction {
    fn horizon(&self) -> f64 {
        *self.times.last().expect("validated non-empty")
    }

    fn value(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        // first index with times[k] >= t; k >= 1 here
        let k = self.times.partition_point(|&s| s < t);
        match self.interpolation {
            Interpolation::PiecewiseConstantRight => self.values[k],
            Interpolation::Linear => {
                let (t0, t1) = (self.times[k - 1], self.times[k]);
                let (v0, v1) = (self.values[k - 1], self.values[k]);
                if t == t1 {
                    return v1;
                }
                v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
            }
        }
    }

    fn resolution(&self, t: f64) -> f64 {
        let n = self.times.len();
        let k = self.times.partition_point(|&s| s < t).clamp(1, n - 1);
        self.times[k] - self.times[k - 1]
    }

    fn next_knot(&self, t: f64) -> Option<f64> {
        let k = self.times.partition_point(|&s| s <= t);
        self.times.get(k).copied()
    }
}

/// Closed-form drivers used throughout the examples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `λ ≡ c`.
    Constant { c: f64, horizon: f64 },
    /// `λ(t) = k √t`; its trace is a straight ray.
    SqrtRay { k: f64, horizon: f64 },
    /// `λ(t) = c √(1 - t)` on `[0, 1]`.
    Bubble { c: f64 },
    /// `λ(t) = x + s (4a - 4a √(1 - t/a²))` on `[0, horizon]`, `horizon ≤ a²`, `s = ±1`.
    ScaledBase { x: f64, a: f64, sign: f64, horizon: f64 },
}

impl Driver for ClosedForm {
    fn horizon(&self) -> f64 {
        match *self {
            ClosedForm::Constant { horizon, .. } | ClosedForm::SqrtRay { horizon, .. } => horizon,
            ClosedForm::Bubble { .. } => 1.0,
            ClosedForm::ScaledBase { horizon, .. } => horizon,
        }
    }

    fn value(&self, t: f64) -> f64 {
        match *self {
            ClosedForm::Constant { c, .. } => c,
            ClosedForm::SqrtRay { k, .. } => k * t.max(0.0).sqrt(),
            ClosedForm::Bubble { c } => c * (1.0 - t).max(0.0).sqrt(),
            ClosedForm::ScaledBase { x, a, sign, .. } => {
                let u = (1.0 - t / (a * a)).max(0.0);
                x + sign * 4.0 * a * (1.0 - u.sqrt())
            }
        }
    }

    fn value_before_end(&self, u: f64) -> f64 {
        match *self {
            ClosedForm::Bubble { c } => c * u.max(0.0).sqrt(),
            ClosedForm::ScaledBase { x, a, sign, horizon } => {
                let rem = ((a * a - horizon) + u).max(0.0) / (a * a);
                x + sign * 4.0 * a * (1.0 - rem.sqrt())
            }
            _ => self.value(self.horizon() - u),
        }
    }
}

/// A driver given by a closure.
pub struct FnDriver<F> {
    f: F,
    horizon: f64,
}

impl<F: Fn(f64) -> f64 + Sync> FnDriver<F> {
    pub fn new(horizon: f64, f: F) -> Self {
        Self { f, horizon }
    }
}

impl<F: Fn(f64) -> f64 + Sync> Driver for FnDriver<F> {
    fn horizon(&self) -> f64 {
        self.horizon
    }
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
}

/// Samples of `driver` on `n` uniform steps.
pub fn sample_uniform(driver: &impl Driver, n: usize) -> Result<DrivingFunction> {
    let horizon = driver.horizon();
    DrivingFunction::from_fn(|t| driver.value(t), horizon, n)
}

/// `t ↦ ±(r λ(t/r²)) + x`.
pub fn transform_driving(lambda: &DrivingFunction, r: f64, x: f64, reflect: bool) -> Result<DrivingFunction> {
    lambda.transform(r, x, reflect)
}

/// Concatenation with a default junction tolerance of `1e-9` (relative to the junction value).
pub fn concat_driving(first: &DrivingFunction, second: &DrivingFunction) -> Result<DrivingFunction> {
    let tol = 1e-9 * (1.0 + first.end_value().abs());
    first.concat(second, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DrivingFunction::new(vec![0.0], vec![1.0]).is_err());
        assert!(DrivingFunction::new(vec![0.1, 1.0], vec![1.0, 1.0]).is_err());
        assert!(DrivingFunction::new(vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(DrivingFunction::new(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        assert!(DrivingFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn interpolation_modes() {
        let d = DrivingFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(d.value(0.5), 1.0);
        assert_eq!(d.value(1.5), 1.0);
        assert_eq!(d.value(5.0), 0.0);
        let d = d.with_mode(Interpolation::PiecewiseConstantRight);
        assert_eq!(d.value(0.5), 2.0);
        assert_eq!(d.value(1.0), 2.0);
        assert_eq!(d.value(1.5), 0.0);
        assert_eq!(d.value(0.0), 0.0);
    }

    #[test]
    fn scaling_constant_driver() {
        let d = DrivingFunction::constant(0.0, 1.0).unwrap();
        let s = d.transform(3.0, 0.0, false).unwrap();
        assert_eq!(s.horizon(), 9.0);
        assert!(s.values().iter().all(|&v| v == 0.0));
        assert!(d.transform(0.0, 0.0, false).is_err());
        assert!(d.transform(-1.0, 0.0, false).is_err());
    }

    #[test]
    fn scaling_bubble_driver() {
        let d = sample_uniform(&ClosedForm::Bubble { c: 4.0 }, 400).unwrap();
        let s = transform_driving(&d, 2.0, 0.0, false).unwrap();
        assert_eq!(s.horizon(), 4.0);
        for (&t, &v) in s.times().iter().zip(s.values()) {
            let expected = 8.0 * (1.0 - t / 4.0).max(0.0).sqrt();
            assert!((v - expected).abs() < 1e-12, "t={t}: {v} vs {expected}");
        }
    }

    #[test]
    fn reflection() {
        let d = DrivingFunction::constant(1.0, 1.0).unwrap();
        let r = d.transform(1.0, 0.0, true).unwrap();
        assert!(r.values().iter().all(|&v| v == -1.0));
    }

    #[test]
    fn concatenation() {
        let zero = DrivingFunction::constant(0.0, 1.0).unwrap();
        let both = concat_driving(&zero, &zero).unwrap();
        assert_eq!(both.horizon(), 2.0);
        assert!(both.values().iter().all(|&v| v == 0.0));

        let rise = DrivingFunction::from_fn(|t| 4.0 - 4.0 * (1.0 - t).sqrt(), 1.0, 100).unwrap();
        let joined = concat_driving(&zero, &rise).unwrap();
        assert_eq!(joined.horizon(), 2.0);
        assert_eq!(joined.value(1.0), 0.0);
        assert!((joined.value(1.5) - rise.value(0.5)).abs() < 1e-15);

        let jump = DrivingFunction::constant(1.0, 1.0).unwrap();
        assert!(matches!(concat_driving(&zero, &jump), Err(Error::Discontinuous { .. })));
    }

    #[test]
    fn truncation_inserts_endpoint() {
        let d = DrivingFunction::from_fn(|t| t, 1.0, 4).unwrap();
        let t = d.truncate(0.6).unwrap();
        assert_eq!(t.horizon(), 0.6);
        assert!((t.end_value() - 0.6).abs() < 1e-15);
        let t = d.truncate(0.5).unwrap();
        assert_eq!(t.len(), 3);
    }
}
