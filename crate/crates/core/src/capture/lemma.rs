//! Trapping interval, tail length and the phase-inequality margin.

use serde::{Deserialize, Serialize};

use super::flow::{flow_x, FlowOptions};
use super::sigma_of;
use crate::analysis::{lip_norm_estimate, DEFAULT_PAIR_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::geometry::HalfPlanePoint;
use crate::loewner::{evolve_point, sample_uniform, Driver, Evolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub epsilon: f64,
    pub m: Option<f64>,
    /// `2 + ε - √(ε(ε + 4))`.
    pub l: f64,
    /// `[L, L + 5√ε]`.
    pub interval: (f64, f64),
    pub s0: Option<f64>,
    pub delta: Option<f64>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    Ok(())
}

fn check_m(m: f64) -> Result<()> {
    if !(m > 0.0 && m < 4.0) {
        return Err(invalid(format!("M must lie in (0, 4), got {m}")));
    }
    Ok(())
}

/// `L` and `I`; the other fields are left empty.
pub fn lemma_interval_constants(epsilon: f64) -> Result<LemmaConstants> {
    check_epsilon(epsilon)?;
    let l = 2.0 + epsilon - (epsilon * (epsilon + 4.0)).sqrt();
    Ok(LemmaConstants {
        epsilon,
        m: None,
        l,
        interval: (l, l + 5.0 * epsilon.sqrt()),
        s0: None,
        delta: None,
    })
}

/// `Δ = 10√ε / (4 - M)`.
pub fn lemma_tail_delta(epsilon: f64, m: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_m(m)?;
    Ok(10.0 * epsilon.sqrt() / (4.0 - m))
}

/// `-∂x = (x² - σx + 4) / (2(σ - x))`.
pub fn drift(sigma: f64, x: f64) -> f64 {
    (x * x - sigma * x + 4.0) / (2.0 * (sigma - x))
}

/// Minimizer and minimum of `drift(M, ·)` on `x < M`: `(M - 2, (4 - M) / 2)`.
pub fn drift_minimum(m: f64) -> Result<(f64, f64)> {
    check_m(m)?;
    Ok((m - 2.0, (4.0 - m) / 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub constants: LemmaConstants,
    pub capture_time: f64,
    pub norm_estimate: f64,
    /// First `s` with `x_s ∈ I`.
    pub s0_observed: Option<f64>,
    /// `x_s` stays in `I` from `s0_observed` up to `s_max` (or the hit).
    pub containment: bool,
    pub s_end: f64,
}

/// Follows `x_s` for a driver normalized on `[0, 1]` and checks entry into and
/// containment in the trapping interval.
///
/// Fails when the sampled norm of `lambda` exceeds `4 + 2ε` or when `x` is not
/// captured at `t = 1`.
pub fn verify_lemma_interval(lambda: &impl Driver, x: f64, epsilon: f64, s_max: f64) -> Result<LemmaReport> {
    let mut constants = lemma_interval_constants(epsilon)?;
    if (lambda.horizon() - 1.0).abs() > 1e-12 {
        return Err(invalid("driver must be normalized to [0, 1]"));
    }
    let norm_estimate = lip_norm_estimate(&sample_uniform(lambda, 4096)?, DEFAULT_PAIR_BUDGET).estimate;
    let bound = 4.0 + 2.0 * epsilon;
    if norm_estimate > bound * (1.0 + 1e-9) {
        return Err(invalid(format!("driver norm {norm_estimate} exceeds 4 + 2ε = {bound}")));
    }
    let capture_time = match evolve_point(lambda, HalfPlanePoint::real(x), 0.0, 1.0, 1e-10)? {
        Evolution::Captured { time } if time >= 1.0 - 1e-9 => time,
        other => return Err(Error::NotCaptured { x, outcome: format!("{other:?}") }),
    };

    let path = flow_x(|s| sigma_of(lambda, s), x, s_max, &FlowOptions::default())?;
    let (lo, hi) = constants.interval;
    let slack = 1e-9 * (1.0 + hi);
    let inside = |v: f64| v >= lo - slack && v <= hi + slack;
    let entry = path.states.iter().position(|st| inside(st.x));
    let s0_observed = entry.map(|k| path.states[k].s);
    let containment = entry.is_some_and(|k| path.states[k..].iter().all(|st| inside(st.x)));
    constants.s0 = s0_observed;
    Ok(LemmaReport {
        constants,
        capture_time,
        norm_estimate,
        s0_observed,
        containment,
        s_end: path.last().s,
    })
}

fn check_phase_domain(m: f64, epsilon: f64) -> Result<()> {
    check_m(m)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Coefficient of `√(e^{-s} T₂)` in the worst case of the phase inequality:
/// `(4+2ε)√(2e^{-Δ} + (1-e^{-Δ})/2) - M e^{-Δ/2} + (4+2ε)√((1-e^{-Δ})/2) - M e^{-Δ/2}`.
pub fn phase_inequality_margin(m: f64, epsilon: f64) -> Result<f64> {
    check_phase_domain(m, epsilon)?;
    let delta = 10.0 * epsilon.sqrt() / (4.0 - m);
    let c = 4.0 + 2.0 * epsilon;
    let decay = (-delta).exp();
    let spread = -(-delta).exp_m1();
    let half = (-delta / 2.0).exp();
    Ok(c * (2.0 * decay + spread / 2.0).sqrt() - m * half + c * (spread / 2.0).sqrt() - m * half)
}

/// The same quantity built from the intervals themselves at a given `s` and `T₂`.
///
/// `I₂ = [(1-e^{-s})T₂, (1-e^{-(s+Δ)})T₂]`, `T₁` its midpoint, `I₁` is `I₂` shifted left
/// by `T₂ - T₁` and `t₁` its right endpoint; `T_i - t_i` and `|t₂ - T₁|` take their
/// extreme admissible values.
pub fn phase_margin_unfactored(m: f64, epsilon: f64, s: f64, t2_cap: f64) -> Result<f64> {
    check_phase_domain(m, epsilon)?;
    if !(s >= 0.0) || !(t2_cap > 0.0) {
        return Err(invalid("need s >= 0 and T2 > 0"));
    }
    let delta = 10.0 * epsilon.sqrt() / (4.0 - m);
    let c = 4.0 + 2.0 * epsilon;
    let i2 = ((1.0 - (-s).exp()) * t2_cap, (1.0 - (-(s + delta)).exp()) * t2_cap);
    let t1_cap = (i2.0 + i2.1) / 2.0;
    let shift = t2_cap - t1_cap;
    let t1 = i2.1 - shift;
    let tail = t2_cap - i2.1;
    let near = (t1_cap - i2.0).max(i2.1 - t1_cap);
    let lhs = c * (t2_cap - t1).sqrt() - m * tail.sqrt() + c * near.sqrt() - m * tail.sqrt();
    Ok(lhs / ((-s).exp() * t2_cap).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCheck {
    pub factored: f64,
    /// `(s, unfactored value)` at `s₀`, `s₀ + 1`, `s₀ + 10`.
    pub samples: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

pub fn phase_margin_check(m: f64, epsilon: f64, s0: f64, t2_cap: f64) -> Result<PhaseCheck> {
    let factored = phase_inequality_margin(m, epsilon)?;
    let samples = [s0, s0 + 1.0, s0 + 10.0]
        .iter()
        .map(|&s| phase_margin_unfactored(m, epsilon, s, t2_cap).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = samples.iter().map(|&(_, v)| (v - factored).abs()).fold(0.0, f64::max);
    Ok(PhaseCheck { factored, samples, max_deviation })
}
