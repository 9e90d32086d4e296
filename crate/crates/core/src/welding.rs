//! Inverse problem: driving functions of polyline curves by vertical-slit zipping.
//!
//! Each step takes the image `ζ` of the next curve vertex under the maps built so far,
//! erases it with the vertical slit at `Re ζ` of capacity `(Im ζ)² / 4`, and pushes every
//! remaining vertex through that slit map.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::Polyline;
use crate::loewner::slit::{slit_forward_sided, SlitSide};
use crate::loewner::{solve_trace, Driver, DrivingFunction, SlitMapChain, SlitStep, StepPolicy};

/// Pending images below this (relative) depth count as a branch failure.
const BRANCH_TOL: f64 = 1e-9;

/// Subdivides edges so none is longer than `delta`. Input vertices are kept.
pub fn refine_polyline(curve: &Polyline, delta: f64) -> Result<Polyline> {
    if curve.len() < 2 {
        return Err(invalid("curve needs at least two vertices"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    let v = &curve.vertices;
    let mut out = Vec::with_capacity(v.len());
    out.push(v[0]);
    for w in v.windows(2) {
        let len = (w[1] - w[0]).norm();
        let pieces = (len / delta).ceil().max(1.0) as usize;
        for k in 1..pieces {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / pieces as f64));
        }
        out.push(w[1]);
    }
    Ok(Polyline::new(out))
}

/// Zipper state: the chain built so far and the images of the vertices not yet absorbed.
#[derive(Debug, Clone)]
pub struct WeldState {
    chain: SlitMapChain,
    pending: Vec<Complex64>,
    next: usize,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl WeldState {
    /// Starts a run on `curve`, whose first vertex must lie on the real line.
    pub fn new(curve: &Polyline) -> Result<Self> {
        if curve.len() < 2 {
            return Err(invalid("curve needs at least two vertices"));
        }
        let start = curve.vertices[0];
        if start.im != 0.0 || !start.re.is_finite() {
            return Err(invalid(format!("curve must start on the real line, got {start}")));
        }
        if let Some(k) = curve.vertices.iter().position(|z| !(z.im >= 0.0) || !z.re.is_finite()) {
            return Err(invalid(format!("vertex {k} is not in the closed upper half-plane")));
        }
        Ok(Self {
            chain: SlitMapChain::new(),
            pending: curve.vertices.clone(),
            next: 1,
            times: vec![0.0],
            values: vec![start.re],
        })
    }

    pub fn chain(&self) -> &SlitMapChain {
        &self.chain
    }

    /// Capacity absorbed so far.
    pub fn elapsed(&self) -> f64 {
        self.chain.total_capacity()
    }

    /// Index of the next vertex to absorb.
    pub fn position(&self) -> usize {
        self.next
    }

    pub fn is_done(&self) -> bool {
        self.next >= self.pending.len()
    }

    /// Current images of the vertices not yet absorbed.
    pub fn pending(&self) -> &[Complex64] {
        &self.pending[self.next..]
    }

    /// Absorbs the next vertex; returns the new `(time, value)` sample.
    pub fn absorb_next(&mut self) -> Result<(f64, f64)> {
        let index = self.next;
        let zeta = *self
            .pending
            .get(index)
            .ok_or_else(|| invalid("no vertices left to absorb"))?;
        let x = zeta.re;
        let dt = zeta.im * zeta.im / 4.0;
        if !(dt > 0.0) {
            return Err(Error::NonPositiveCapacity { index, dt });
        }
        let y = zeta.im;
        self.chain.push(SlitStep { x, dt })?;

        let prev_side = if self.pending[index - 1].re < x { SlitSide::Left } else { SlitSide::Right };
        let rest = &mut self.pending[index + 1..];
        let failure = rest
            .par_iter_mut()
            .enumerate()
            .map(|(j, z)| {
                let w = push_through(*z, x, y, prev_side);
                let scale = 1.0 + (w - x).norm();
                if w.im < -BRANCH_TOL * scale {
                    return Some((index + 1 + j, w.im));
                }
                *z = Complex64::new(w.re, w.im.max(0.0));
                None
            })
            .find_first(|f| f.is_some())
            .flatten();
        if let Some((bad, im)) = failure {
            return Err(Error::BranchFailure { index: bad, im });
        }
        self.pending[index] = Complex64::new(x, 0.0);
        self.next += 1;

        let t = self.elapsed();
        if t > *self.times.last().unwrap() {
            self.times.push(t);
            self.values.push(x);
        } else {
            // Capacity increment below the resolution of t: keep the latest value.
            *self.values.last_mut().unwrap() = x;
        }
        Ok((t, x))
    }

    /// Absorbs vertices until index `end` (exclusive) has been reached.
    pub fn absorb_until(&mut self, end: usize) -> Result<()> {
        let end = end.min(self.pending.len());
        while self.next < end {
            self.absorb_next()?;
        }
        Ok(())
    }

    pub fn absorb_all(&mut self) -> Result<()> {
        self.absorb_until(self.pending.len())
    }

    /// Samples emitted so far.
    pub fn driving(&self) -> Result<DrivingFunction> {
        DrivingFunction::new(self.times.clone(), self.values.clone())
    }
}

/// Slit map without clamping, so that branch failures stay visible.
fn push_through(z: Complex64, x: f64, y: f64, side: SlitSide) -> Complex64 {
    let u = z - x;
    if u.re == 0.0 && u.im >= 0.0 && u.im <= y {
        return slit_forward_sided(z, x, y, side);
    }
    if u.im == 0.0 {
        let s = (u.re * u.re + y * y).sqrt();
        return Complex64::new(if u.re < 0.0 { x - s } else { x + s }, 0.0);
    }
    let q = Complex64::new(y, 0.0) / u;
    x + u * (Complex64::new(1.0, 0.0) + q * q).sqrt()
}

/// Driving function of `curve` after refining it to edge length `delta`.
pub fn extract_driving(curve: &Polyline, delta: f64) -> Result<DrivingFunction> {
    let refined = refine_polyline(curve, delta)?;
    let mut state = WeldState::new(&refined)?;
    state.absorb_all()?;
    state.driving()
}

/// Result of extracting the driver back from a computed trace.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub residual: f64,
    pub extracted: DrivingFunction,
}

/// `sup_k |λ̂(t_k · T̂/T) - λ(t_k)|` over `grid`, where `T̂` is the extracted capacity.
pub fn residual_on_grid(driver: &impl Driver, extracted: &DrivingFunction, grid: &[f64]) -> f64 {
    let scale = extracted.horizon() / driver.horizon();
    grid.iter()
        .map(|&t| (extracted.value(t * scale) - driver.value(t)).abs())
        .fold(0.0, f64::max)
}

/// Solves the trace of `driver` on `steps` uniform substeps, extracts it back at edge
/// length `delta` and compares on the trace's time grid after aligning total capacities.
pub fn round_trip(driver: &impl Driver, steps: usize, delta: f64) -> Result<RoundTrip> {
    let trace = solve_trace(driver, &StepPolicy::uniform(steps))?;
    let extracted = extract_driving(&trace.polyline(), delta)?;
    Ok(RoundTrip { residual: residual_on_grid(driver, &extracted, &trace.times), extracted })
}

pub fn round_trip_residual(driver: &impl Driver, steps: usize, delta: f64) -> Result<f64> {
    round_trip(driver, steps, delta).map(|r| r.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::ClosedForm;

    fn line(pts: &[(f64, f64)]) -> Polyline {
        Polyline::from_pairs(pts)
    }

    #[test]
    fn refine_vertical_segment() {
        let r = refine_polyline(&line(&[(0.0, 0.0), (0.0, 1.0)]), 0.5).unwrap();
        assert_eq!(r.vertices, vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(0.0, 1.0)]);
        let c = line(&[(0.0, 0.0), (0.1, 0.2), (0.3, 0.2)]);
        assert_eq!(refine_polyline(&c, 1.0).unwrap(), c);
        assert!(refine_polyline(&line(&[(0.0, 0.0)]), 0.5).is_err());
        assert!(refine_polyline(&c, 0.0).is_err());
    }

    #[test]
    fn vertical_segments_give_constant_drivers() {
        let h = 1.3;
        let d = extract_driving(&line(&[(0.0, 0.0), (0.0, h)]), 0.01).unwrap();
        assert!(d.values().iter().all(|v| v.abs() < 1e-12));
        assert!((d.horizon() - h * h / 4.0).abs() < 1e-12);

        let d = extract_driving(&line(&[(1.0, 0.0), (1.0, 2.0)]), 0.01).unwrap();
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!((d.horizon() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn touching_the_line_is_rejected() {
        let c = line(&[(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)]);
        let e = extract_driving(&c, 0.1).unwrap_err();
        assert!(matches!(e, Error::NonPositiveCapacity { .. }), "{e:?}");
        assert!(WeldState::new(&line(&[(0.0, 0.1), (0.0, 1.0)])).is_err());
    }

    #[test]
    fn zero_driver_round_trip() {
        let d = DrivingFunction::constant(0.0, 1.0).unwrap();
        assert!(round_trip_residual(&d, 1000, 1e-2).unwrap() < 1e-6);
    }

    #[test]
    fn sqrt_driver_round_trip_shrinks() {
        let d = ClosedForm::SqrtRay { k: 1.0, horizon: 1.0 };
        let coarse = round_trip_residual(&d, 200, 1e-2).unwrap();
        let fine = round_trip_residual(&d, 800, 1e-2).unwrap();
        assert!(fine < coarse, "{fine} vs {coarse}");
    }

    #[test]
    fn stepwise_absorption_matches_one_shot() {
        let c = refine_polyline(&line(&[(0.0, 0.0), (0.2, 0.5), (-0.1, 0.9), (0.3, 1.2)]), 0.05).unwrap();
        let mut s = WeldState::new(&c).unwrap();
        s.absorb_until(10).unwrap();
        assert_eq!(s.position(), 10);
        assert!((s.elapsed() - s.chain().total_capacity()).abs() == 0.0);
        assert!(s.pending().iter().all(|z| z.im >= 0.0));
        s.absorb_all().unwrap();
        assert!(s.is_done());
        let one = extract_driving(&c, 1.0).unwrap();
        assert_eq!(one, s.driving().unwrap());
    }
}
