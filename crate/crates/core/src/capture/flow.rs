//! Integration of the time-changed flow `∂x = -(x² - σx + 4) / (2(σ - x))`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::loewner::ode::dp_step;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    /// `s = -ln(1 - t)`.
    pub s: f64,
    pub x: f64,
    pub sigma: f64,
}

impl FlowState {
    pub fn t(&self) -> f64 {
        -(-self.s).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Increasing,
    Decreasing,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSegment {
    pub start: f64,
    pub end: f64,
    pub trend: Trend,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Relative local error per step.
    pub tol: f64,
    /// Largest step in `s`.
    pub max_step: f64,
    /// `|x - σ| < hit_delta (1 + |σ|)` ends the run with a hit.
    pub hit_delta: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_step: 0.05, hit_delta: 1e-9 }
    }
}

/// Sampled path `s ↦ x_s` at every accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    pub states: Vec<FlowState>,
    /// `s` at which `x_s` met `σ(s)`, if it did before `s_max`.
    pub hit: Option<f64>,
    pub segments: Vec<MonotoneSegment>,
}

impl FlowPath {
    pub fn last(&self) -> FlowState {
        *self.states.last().expect("non-empty")
    }

    /// The single non-stationary trend of the run, if there is one.
    pub fn trend(&self) -> Option<Trend> {
        let mut moving = self.segments.iter().map(|g| g.trend).filter(|&t| t != Trend::Stationary);
        match moving.next() {
            None => Some(Trend::Stationary),
            Some(first) => moving.all(|t| t == first).then_some(first),
        }
    }
}

fn velocity(x: f64, sigma: f64) -> f64 {
    -(x * x - sigma * x + 4.0) / (2.0 * (sigma - x))
}

fn classify(v: f64, x: f64) -> Trend {
    if v.abs() <= 1e-12 * (1.0 + x.abs()) {
        Trend::Stationary
    } else if v > 0.0 {
        Trend::Increasing
    } else {
        Trend::Decreasing
    }
}

/// Integrates the flow from `x0` at `s = 0` up to `s_max`.
///
/// Steps never cross more than a small fraction of `|σ - x|` and are rejected when
/// `x - σ` changes sign, mirroring the forward solver.
pub fn flow_x(sigma: impl Fn(f64) -> f64, x0: f64, s_max: f64, opts: &FlowOptions) -> Result<FlowPath> {
    if !(s_max > 0.0) || !s_max.is_finite() || !x0.is_finite() {
        return Err(invalid(format!("need finite x0 and s_max > 0, got ({x0}, {s_max})")));
    }
    if !(opts.tol > 0.0) || !(opts.max_step > 0.0) || !(opts.hit_delta > 0.0) {
        return Err(invalid("flow options must be positive"));
    }
    let sig0 = sigma(0.0);
    if x0 == sig0 {
        return Err(invalid("starting point coincides with σ(0)"));
    }
    let f = |s: f64, z: Complex64| Complex64::new(velocity(z.re, sigma(s)), 0.0);

    let mut s = 0.0;
    let mut x = x0;
    let mut sig = sig0;
    let mut h = opts.max_step * 0.1;
    let mut states = vec![FlowState { s, x, sigma: sig }];
    let mut trends = vec![classify(velocity(x, sig), x)];
    let mut hit = None;

    while s < s_max {
        let gap = (sig - x).abs();
        if gap < opts.hit_delta * (1.0 + sig.abs()) {
            hit = Some(s);
            break;
        }
        let speed = velocity(x, sig).abs();
        h = h.min(opts.max_step).min(s_max - s);
        if speed > 0.0 {
            h = h.min(0.05 * gap / speed);
        }
        loop {
            if h < 1e-15 * (1.0 + s) {
                return Err(Error::StepUnderflow { t: s, gap });
            }
            let Some((next, err)) = dp_step(&f, s, Complex64::new(x, 0.0), h) else {
                h *= 0.25;
                continue;
            };
            let next_sig = sigma(s + h);
            if (next.re - next_sig).signum() != (x - sig).signum() {
                h *= 0.25;
                continue;
            }
            let scale = opts.tol * gap.min(1.0 + x.abs()).max((next.re - next_sig).abs().min(1.0 + x.abs()));
            let ratio = err / scale.max(1e-300);
            if ratio <= 1.0 {
                s = if s_max - (s + h) < 1e-14 * s_max { s_max } else { s + h };
                x = next.re;
                sig = sigma(s);
                states.push(FlowState { s, x, sigma: sig });
                trends.push(classify(velocity(x, sig), x));
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                h *= grow;
                break;
            }
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }

    let mut segments: Vec<MonotoneSegment> = Vec::new();
    for (st, &trend) in states.iter().zip(&trends) {
        match segments.last_mut() {
            Some(seg) if seg.trend == trend => seg.end = st.s,
            _ => segments.push(MonotoneSegment { start: st.s, end: st.s, trend }),
        }
    }
    Ok(FlowPath { states, hit, segments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capture::fixed_points;

    fn run(sigma: f64, x0: f64, s_max: f64) -> FlowPath {
        flow_x(|_| sigma, x0, s_max, &FlowOptions::default()).unwrap()
    }

    #[test]
    fn fixed_point_is_stationary() {
        let p = run(5.0, 4.0, 3.0);
        assert!(p.states.iter().all(|st| st.x == 4.0));
        assert_eq!(p.trend(), Some(Trend::Stationary));
    }

    #[test]
    fn between_the_fixed_points_the_flow_rises_to_a() {
        let p = run(5.0, 2.0, 20.0);
        assert_eq!(p.trend(), Some(Trend::Increasing));
        assert!((p.last().x - 4.0).abs() < 1e-6, "{:?}", p.last());
        assert!(p.states.windows(2).all(|w| w[1].x >= w[0].x));
    }

    #[test]
    fn below_sigma_under_four_the_flow_falls() {
        let p = run(3.9, 3.0, 2.0);
        assert_eq!(p.trend(), Some(Trend::Decreasing));
        assert!(p.hit.is_none());
    }

    #[test]
    fn sign_table_on_a_grid() {
        let sigma = 5.0;
        let fp = fixed_points(sigma);
        for k in 0..50 {
            let x0 = -3.0 + 10.0 * (k as f64 + 0.5) / 50.0;
            let expected = if x0 < fp.b || (x0 > fp.a && x0 < sigma) {
                Trend::Decreasing
            } else if x0 == fp.a || x0 == fp.b {
                Trend::Stationary
            } else {
                Trend::Increasing
            };
            let p = run(sigma, x0, 1.0);
            assert_eq!(p.trend(), Some(expected), "x0 = {x0}");
        }
    }

    #[test]
    fn time_is_recovered_from_s() {
        let st = FlowState { s: 2f64.ln(), x: 0.0, sigma: 0.0 };
        assert!((st.t() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hit_is_reported() {
        let p = run(3.0, 3.0 + 2e-9, 1.0);
        assert_eq!(p.hit, Some(0.0));
        assert!(run(3.0, 2.999, 5.0).hit.is_none());
        assert!(flow_x(|_| 3.0, 3.0, 1.0, &FlowOptions::default()).is_err());
    }
}
