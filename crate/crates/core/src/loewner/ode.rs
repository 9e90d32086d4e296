//! Adaptive integration of the forward equation `∂g = 2 / (g - λ)`.

use num_complex::Complex64;

use super::driver::Driver;
use crate::error::{invalid, Error, Result};
use crate::geometry::HalfPlanePoint;

/// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth-order solution and the error estimate.
/// `None` when a stage evaluation is non-finite.
pub(crate) fn dp_step(
    f: &impl Fn(f64, Complex64) -> Complex64,
    t: f64,
    y: Complex64,
    h: f64,
) -> Option<(Complex64, f64)> {
    let mut k = [Complex64::new(0.0, 0.0); 7];
    for i in 0..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            yi += *kj * (h * A[i][j]);
        }
        k[i] = f(t + C[i] * h, yi);
        if !k[i].re.is_finite() || !k[i].im.is_finite() {
            return None;
        }
    }
    let mut y5 = y;
    let mut e = Complex64::new(0.0, 0.0);
    for i in 0..7 {
        y5 += k[i] * (h * B5[i]);
        e += k[i] * (h * (B5[i] - B4[i]));
    }
    Some((y5, e.norm()))
}

/// Outcome of evolving one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evolution {
    Alive(HalfPlanePoint),
    Captured { time: f64 },
}

impl Evolution {
    pub fn is_captured(&self) -> bool {
        matches!(self, Evolution::Captured { .. })
    }

    pub fn capture_time(&self) -> Option<f64> {
        match *self {
            Evolution::Captured { time } => Some(time),
            Evolution::Alive(_) => None,
        }
    }
}

/// Relative size of the capture threshold, in units of `√(t1 - t0)`.
pub const CAPTURE_DELTA: f64 = 1e-6;

/// Capture threshold at time `t`: a fixed fraction of the time budget, raised to the
/// square root of the local sample spacing for sampled drivers (which cannot close
/// the gap below that scale). The raised threshold only applies while the gap shrinks.
pub fn capture_threshold(driver: &impl Driver, t: f64, t0: f64, t1: f64, closing: bool) -> f64 {
    let base = CAPTURE_DELTA * (t1 - t0).sqrt();
    if closing {
        base.max(driver.resolution(t).sqrt())
    } else {
        base
    }
}

/// Integrates `∂g = 2 / (g - λ(t))` from `z0` on `[t0, t1]`.
///
/// `tol` bounds the relative local error and the accuracy of a reported capture time.
/// Real points whose gap closes are captured. A non-real point reached by the trace is
/// carried through the encounter with the constant-driver solution and continues as its
/// right-hand boundary value, so `i` under `λ ≡ 0` ends at `√3`.
pub fn evolve_point(driver: &impl Driver, z0: HalfPlanePoint, t0: f64, t1: f64, tol: f64) -> Result<Evolution> {
    if !(t0 >= 0.0) || !(t1 > t0) || t1 > driver.horizon() * (1.0 + 1e-15) {
        return Err(invalid(format!(
            "need 0 <= t0 < t1 <= {}, got [{t0}, {t1}]",
            driver.horizon()
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let mut real = z0.is_real();
    if real && z0.re == driver.value(t0) {
        return Err(invalid("real starting point coincides with the driver"));
    }
    let rtol = tol.min(1e-6);
    let f = |t: f64, g: Complex64| Complex64::new(2.0, 0.0) / (g - driver.value(t));

    let mut t = t0;
    let mut g = z0.to_complex();
    let mut h = ((t1 - t0) * 1e-3).max(1e-12);
    // (time, gap²) before the current point, for extrapolating the capture time
    let mut prev: Option<(f64, f64)> = None;

    loop {
        let lam = driver.value(t);
        let gap = (g - lam).norm();
        if !gap.is_finite() {
            return Err(Error::NonFinite { t });
        }
        let closing = real && prev.is_some_and(|(_, gp2)| gp2 > gap * gap);
        if gap < capture_threshold(driver, t, t0, t1, closing) {
            if real {
                return Ok(Evolution::Captured { time: extrapolate_capture(prev, t, gap, t1, tol) });
            }
            // (g - λ)² grows by 4 per unit time under locally constant driving.
            let dt = (6.0 * gap * gap).min(t1 - t);
            let zeta = g - lam;
            let w = (zeta * zeta + 4.0 * dt).sqrt();
            let w = if w.im < 0.0 { -w } else { w };
            t = if t1 - (t + dt) < 1e-15 * t1 { t1 } else { t + dt };
            g = Complex64::new(lam + w.re, w.im.max(0.0));
            real = g.im == 0.0;
            prev = None;
            continue;
        }
        if t >= t1 {
            return HalfPlanePoint::try_from_complex(g).map(Evolution::Alive);
        }

        // Never cross more than a small fraction of the gap in one step.
        let speed = 2.0 / gap;
        h = h.min(0.05 * gap / speed).min(t1 - t);
        if let Some(knot) = driver.next_knot(t) {
            if knot < t + h && knot > t {
                h = knot - t;
            }
        }

        loop {
            if h < 1e-15 * (1.0 + t.abs()) {
                return Err(Error::StepUnderflow { t, gap });
            }
            let trial = dp_step(&f, t, g, h);
            let Some((next, err)) = trial else {
                h *= 0.25;
                continue;
            };
            let next_gap = next - driver.value(t + h);
            let crossed = real && (next_gap.re.signum() != (g - lam).re.signum());
            if crossed || next.im < -1e-12 * (1.0 + next.norm()) {
                h *= 0.25;
                continue;
            }
            // Rounding in t and λ(t) bounds the attainable accuracy near the gap scale.
            let slope = (driver.value(t + h) - lam).abs() / h;
            let noise = 4.0 * f64::EPSILON * (slope * t.abs().max(1.0) + g.norm() + lam.abs());
            let floor = rtol.max(10.0 * noise / gap);
            let scale = floor * gap.min(next_gap.norm()).max(1e-300);
            let ratio = err / scale;
            if ratio <= 1.0 {
                prev = Some((t, gap * gap));
                t = if t1 - (t + h) < 1e-15 * t1 { t1 } else { t + h };
                g = Complex64::new(next.re, if real { 0.0 } else { next.im.max(0.0) });
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                h *= grow;
                break;
            }
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
}

/// Capture time from the last two gaps, assuming `gap²` is locally linear in time.
fn extrapolate_capture(prev: Option<(f64, f64)>, t: f64, gap: f64, t1: f64, tol: f64) -> f64 {
    let g2 = gap * gap;
    let estimate = match prev {
        Some((tp, gp2)) if gp2 > g2 && t > tp => t + g2 * (t - tp) / (gp2 - g2),
        _ => t,
    };
    let estimate = estimate.clamp(t, t1);
    if t1 - estimate <= tol {
        t1
    } else {
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::driver::{ClosedForm, DrivingFunction};

    fn p(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn constant_driver_matches_closed_form() {
        let d = DrivingFunction::constant(0.0, 1.0).unwrap();
        let out = evolve_point(&d, p(0.0, 1.0), 0.0, 1.0, 1e-10).unwrap();
        let Evolution::Alive(w) = out else { panic!("unexpected capture") };
        assert!((w.re - 3f64.sqrt()).abs() < 1e-9 && w.im.abs() < 1e-9, "{w:?}");

        let z = Complex64::new(0.7, 0.3);
        let out = evolve_point(&d, HalfPlanePoint::try_from_complex(z).unwrap(), 0.0, 1.0, 1e-10).unwrap();
        let Evolution::Alive(w) = out else { panic!() };
        let exact = (z * z + 4.0).sqrt();
        assert!((w.to_complex() - exact).norm() < 1e-9);
    }

    #[test]
    fn bubble_captures_points_between_fixed_points() {
        let d = ClosedForm::Bubble { c: 5.0 };
        let out = evolve_point(&d, p(4.5, 0.0), 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(out, Evolution::Captured { time: 1.0 });
    }

    #[test]
    fn bubble_spares_points_below_repeller() {
        let d = ClosedForm::Bubble { c: 5.0 };
        let out = evolve_point(&d, p(0.5, 0.0), 0.0, 1.0, 1e-10).unwrap();
        let Evolution::Alive(w) = out else { panic!("0.5 should survive") };
        assert!(w.re < 0.5 && w.im == 0.0);
        // fixed-step cross-check
        let n = 200_000;
        let mut x = 0.5f64;
        for k in 0..n {
            let t = k as f64 / n as f64;
            let dt = 1.0 / n as f64;
            let k1 = 2.0 / (x - d.value(t));
            let k2 = 2.0 / (x + 0.5 * dt * k1 - d.value(t + 0.5 * dt));
            x += dt * k2;
        }
        assert!((x - w.re).abs() < 1e-4, "{x} vs {}", w.re);
    }

    #[test]
    fn capture_verdict_stable_under_halving_tol() {
        let d = ClosedForm::Bubble { c: 5.0 };
        for x in [0.5, 1.5, 3.0, 4.2, 4.9] {
            let a = evolve_point(&d, p(x, 0.0), 0.0, 1.0, 1e-8).unwrap();
            let b = evolve_point(&d, p(x, 0.0), 0.0, 1.0, 5e-9).unwrap();
            assert_eq!(a.is_captured(), b.is_captured(), "x = {x}");
            if let (Some(ta), Some(tb)) = (a.capture_time(), b.capture_time()) {
                assert!((ta - tb).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = DrivingFunction::constant(0.0, 1.0).unwrap();
        assert!(evolve_point(&d, p(0.0, 0.0), 0.0, 1.0, 1e-8).is_err());
        assert!(evolve_point(&d, p(1.0, 1.0), 0.5, 0.5, 1e-8).is_err());
        assert!(evolve_point(&d, p(1.0, 1.0), 0.0, 2.0, 1e-8).is_err());
    }

    #[test]
    fn sampled_driver_steps_through_knots() {
        let d = DrivingFunction::from_fn(|t| (3.0 * t).sin(), 1.0, 50).unwrap();
        let out = evolve_point(&d, p(0.2, 1.0), 0.0, 1.0, 1e-10).unwrap();
        assert!(matches!(out, Evolution::Alive(_)));
    }
}
