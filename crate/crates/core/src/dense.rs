//! Drivers of norm at most 4 whose traces visit prescribed points.
//!
//! The building block is the trace `γ` of `t ↦ 4 - 4√(1 - t)`, a simple arc from 0 that
//! lands at 2. Scaling by `a` and stopping at `a² τ_θ`, where `γ(τ_θ)` is the point of `γ`
//! at angle `θ`, reaches any target at angle `θ` from the current tip. Between targets
//! the driver is held constant long enough that `4 T_n σ_n ≤ τ_n²`, so that pairs of
//! times straddling the junction stay within the norm bound.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{lip_norm_estimate, NormReport, DEFAULT_PAIR_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::geometry::{HalfPlanePoint, Polyline};
use crate::loewner::{ClosedForm, Driver, DrivingFunction, SlitMapChain, SlitStep, Trace};

/// Largest target angle handled by a single segment.
pub const WINDOW: f64 = FRAC_PI_3;
/// Slack on the waiting time and on the window.
pub const SAFETY: f64 = 1.1;
/// Time left on the unit arc at its last vertex.
const BASE_END: f64 = 1e-52;
/// Smallest time left at which targets are placed; below it `x + 4a(1 - √v)` no longer
/// resolves the steps once shifted and scaled.
const HIT_END: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayEntry {
    pub theta: f64,
    /// `|γ(τ_θ)|`.
    pub r: f64,
    /// Capacity time at which `γ` crosses the ray.
    pub tau: f64,
}

/// Exact crossing of a ray with the discrete arc: `full` whole steps, then a partial step
/// of capacity `partial`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseHit {
    pub full: usize,
    pub partial: f64,
    pub tip: Complex64,
}

/// The base arc, its slit steps and its ray table over `(0, WINDOW]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseFamily {
    pub base_trace: Trace,
    pub ray_table: Vec<RayEntry>,
    pub r_min: f64,
    chain: SlitMapChain,
    mirror: SlitMapChain,
    tips: Vec<Complex64>,
    /// Time left `1 - t` at each vertex.
    left: Vec<f64>,
    angles: Vec<f64>,
    /// Number of leading angles at which targets are hit exactly.
    exact: usize,
}

/// Value of the unit arc's driver at time left `v`.
fn base_value(v: f64) -> f64 {
    4.0 * (1.0 - v.sqrt())
}

/// Discretizes the unit arc with steps of at most `1 / resolution` that shrink in
/// proportion to the time left near the landing, and tabulates `table_size` rays.
pub fn build_base_family(resolution: usize, table_size: usize) -> Result<BaseFamily> {
    if table_size < 2 || resolution < 20 {
        return Err(invalid("need resolution >= 20 and at least two ray table entries"));
    }
    let h_max = 1.0 / resolution as f64;
    let ratio = 10.0 / resolution as f64;
    // Grid in the time left, so that values near the landing stay exact.
    let mut left = vec![1.0];
    while *left.last().unwrap() > BASE_END {
        let v = *left.last().unwrap();
        let ratio = if v > 1e-13 { ratio } else { 0.05 };
        left.push(v - h_max.min(ratio * v));
    }
    let steps: Vec<SlitStep> = left
        .windows(2)
        .map(|w| SlitStep { x: base_value(0.5 * (w[0] + w[1])), dt: w[0] - w[1] })
        .collect();
    let chain = SlitMapChain::from_steps(steps)?;
    // Tips through the mirror image, driven by `4√v`, whose values stay exact near the landing.
    let mirror = SlitMapChain::from_steps(
        left.windows(2).map(|w| SlitStep { x: 4.0 * (0.5 * (w[0] + w[1])).sqrt(), dt: w[0] - w[1] }).collect(),
    )?;
    let tips: Vec<Complex64> = mirror.tips(4.0).into_iter().map(|z| Complex64::new(4.0 - z.re, z.im)).collect();
    let exact = left.iter().position(|&v| v < HIT_END).unwrap_or(left.len()) - 1;
    let angles: Vec<f64> = tips[1..].iter().map(|v| v.im.atan2(v.re)).collect();
    // Times `1 - v` stop resolving the tail; the trace keeps the last vertex of each run.
    let mut vertices: Vec<HalfPlanePoint> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for (z, v) in tips.iter().zip(&left) {
        let (p, t) = (HalfPlanePoint::try_from_complex(*z)?, 1.0 - v);
        if times.last().is_some_and(|&last| t <= last) {
            *vertices.last_mut().unwrap() = p;
        } else {
            vertices.push(p);
            times.push(t);
        }
    }
    let base_trace = Trace::new(vertices, times)?;
    // Rays must meet the arc once: angles decrease strictly wherever they are in the window.
    let first = angles.iter().position(|&a| a <= WINDOW * SAFETY).ok_or_else(|| {
        Error::BaseFamily("arc never enters the angle window".into())
    })?;
    if let Some(k) = angles[first.min(exact)..exact].windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::BaseFamily(format!(
            "angle not strictly decreasing at vertex {} ({} then {}); raise the resolution",
            first.min(exact) + k + 1,
            angles[first.min(exact) + k],
            angles[first.min(exact) + k + 1]
        )));
    }
    let mut family = BaseFamily { base_trace, ray_table: Vec::new(), r_min: 0.0, chain, mirror, tips, left, angles, exact };
    let table: Vec<RayEntry> = (1..=table_size)
        .map(|k| family.ray(WINDOW * k as f64 / table_size as f64))
        .collect::<Result<_>>()?;
    family.r_min = table.iter().map(|e| e.r).fold(f64::INFINITY, f64::min);
    if !(family.r_min > 0.0) {
        return Err(Error::BaseFamily("non-positive ray radius".into()));
    }
    family.ray_table = table;
    Ok(family)
}

impl BaseFamily {
    /// Last vertex of the discrete arc.
    pub fn landing(&self) -> Complex64 {
        self.base_trace.last().to_complex()
    }

    /// Smallest angle at which targets are hit exactly.
    pub fn min_angle(&self) -> f64 {
        self.angles[self.exact - 1]
    }

    fn check_angle(theta: f64) -> Result<()> {
        if !(theta > 0.0 && theta <= WINDOW * (1.0 + 1e-12)) {
            return Err(Error::OutsideWindow { theta, window: WINDOW });
        }
        Ok(())
    }

    /// Intersection of the ray at angle `theta` with the arc's polyline. Angles below that
    /// of the last vertex give the landing point.
    pub fn ray(&self, theta: f64) -> Result<RayEntry> {
        Self::check_angle(theta)?;
        let v = &self.tips;
        let last = self.angles.len();
        if theta <= self.angles[last - 1] {
            return Ok(RayEntry { theta, r: v[last].norm(), tau: 1.0 - self.left[last] });
        }
        // angles[k] belongs to vertex k + 1; find the last vertex above theta
        let k = self.angles.partition_point(|&x| x > theta).saturating_sub(1);
        let (p, q) = (v[k + 1], v[k + 2]);
        let dir = Complex64::from_polar(1.0, theta);
        // solve p + s (q - p) = r dir
        let d = q - p;
        let cross = |u: Complex64, w: Complex64| u.re * w.im - u.im * w.re;
        let den = cross(d, dir);
        let s = if den == 0.0 { 0.0 } else { (-cross(p, dir) / den).clamp(0.0, 1.0) };
        let hit = p + d * s;
        let left = self.left[k + 1] + s * (self.left[k + 2] - self.left[k + 1]);
        Ok(RayEntry { theta, r: hit.norm(), tau: 1.0 - left })
    }

    /// Tip after `full` whole steps and a partial step of capacity `s`.
    fn partial_tip(&self, full: usize, s: f64) -> Complex64 {
        let x = 4.0 * (self.left[full] - 0.5 * s).sqrt();
        let z = self.mirror.inverse_prefix(Complex64::new(x, 2.0 * s.sqrt()), full);
        Complex64::new(4.0 - z.re, z.im)
    }

    /// Point of the discrete trace (not its polyline) at angle `theta`, by bisection on
    /// the capacity of the last partial step. Below [`Self::min_angle`] the nearest
    /// following vertex is returned instead.
    pub fn hit(&self, theta: f64) -> Result<BaseHit> {
        Self::check_angle(theta)?;
        if theta <= self.min_angle() {
            // Unresolved tail: stop at the first vertex at or below the ray.
            let full = (self.angles.partition_point(|&x| x > theta) + 1).min(self.angles.len());
            return Ok(BaseHit { full, partial: 0.0, tip: self.tips[full] });
        }
        let full = self.angles.partition_point(|&x| x > theta);
        let (mut lo, mut hi) = (0.0, self.chain.steps()[full].dt);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let z = self.partial_tip(full, mid);
            if z.im.atan2(z.re) > theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(BaseHit { full, partial: hi, tip: self.partial_tip(full, hi) })
    }
}

/// Angle of `w` seen from the tip, folded into `(0, π/2]`, and whether it was mirrored.
fn folded_angle(w: Complex64) -> (f64, bool) {
    let arg = w.im.atan2(w.re);
    if arg > FRAC_PI_2 {
        (PI - arg, true)
    } else {
        (arg, false)
    }
}

/// One segment of the construction with its slit steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub driver: ClosedForm,
    pub duration: f64,
    /// Steps whose last tip is the target, relative to the chain built so far.
    pub steps: Vec<SlitStep>,
}

/// Driver from `x` whose trace ends at `x + w`, `Im w > 0`. Vertical targets use
/// `vertical_steps` equal steps of the constant driver.
pub fn segment_driver(x: f64, w: Complex64, family: &BaseFamily, vertical_steps: usize) -> Result<Segment> {
    if !(w.im > 0.0) || !w.re.is_finite() || !x.is_finite() {
        return Err(invalid(format!("segment target must lie in the upper half-plane, got {w}")));
    }
    if w.re.abs() <= 1e-12 * w.norm() {
        let duration = w.im * w.im / 4.0;
        return Ok(Segment {
            driver: ClosedForm::Constant { c: x, horizon: duration },
            duration,
            steps: constant_steps(x, duration, vertical_steps),
        });
    }
    let (theta, mirrored) = folded_angle(w);
    let hit = family.hit(theta)?;
    let a = w.norm() / hit.tip.norm();
    let sign = if mirrored { -1.0 } else { 1.0 };
    let scale = a * a;
    let base = family.chain.steps();
    let mut steps: Vec<SlitStep> =
        base[..hit.full].iter().map(|s| SlitStep { x: x + sign * a * s.x, dt: scale * s.dt }).collect();
    let v = family.left[hit.full];
    if hit.partial > 0.0 {
        steps.push(SlitStep { x: x + sign * a * base_value(v - 0.5 * hit.partial), dt: scale * hit.partial });
    }
    let duration = scale * ((1.0 - v) + hit.partial);
    Ok(Segment { driver: ClosedForm::ScaledBase { x, a, sign, horizon: duration }, duration, steps })
}

/// `n` equal steps of the constant driver `x` over `duration`.
pub fn constant_steps(x: f64, duration: f64, n: usize) -> Vec<SlitStep> {
    let n = n.max(1);
    vec![SlitStep { x, dt: duration / n as f64 }; n]
}

/// Image of the target relative to the tip after waiting `tau` under constant driving.
pub fn waited_image(w: Complex64, tau: f64) -> Complex64 {
    let r = (w * w + 4.0 * tau).sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Smallest admissible wait, times [`SAFETY`], for a target at `w` relative to the tip
/// after capacity `t_n`: the waited angle lies in `(0, WINDOW / SAFETY]` and
/// `4 t_n σ(τ) ≤ τ²` for the duration `σ(τ)` of the following segment.
pub fn waiting_time(t_n: f64, w: Complex64, family: &BaseFamily) -> Result<f64> {
    if !(w.im > 0.0) || !(t_n >= 0.0) {
        return Err(invalid("waiting needs a target in the upper half-plane and t_n >= 0"));
    }
    let admissible = |tau: f64| -> bool {
        let v = waited_image(w, tau);
        let (theta, _) = folded_angle(v);
        if theta > WINDOW / SAFETY {
            return false;
        }
        match family.ray(theta) {
            Ok(ray) => {
                let sigma = (v.norm() / ray.r).powi(2) * ray.tau;
                4.0 * t_n * sigma <= tau * tau
            }
            Err(_) => false,
        }
    };
    if admissible(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1e-3 * w.norm_sqr().max(t_n).max(1e-12);
    let mut iterations = 0;
    while !admissible(hi) {
        hi *= 2.0;
        iterations += 1;
        if iterations > 400 || !hi.is_finite() {
            return Err(Error::IterationCap("waiting time search".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut tau = hi * SAFETY;
    while !admissible(tau) {
        tau *= 2.0;
        iterations += 1;
        if iterations > 400 {
            return Err(Error::IterationCap("waiting time search".into()));
        }
    }
    Ok(tau)
}

/// Concatenation of closed-form pieces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDriver {
    starts: Vec<f64>,
    pieces: Vec<ClosedForm>,
}

impl PiecewiseDriver {
    pub fn new(start_value: f64) -> Self {
        Self { starts: vec![0.0], pieces: vec![ClosedForm::Constant { c: start_value, horizon: 0.0 }] }
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, &ClosedForm)> + '_ {
        self.starts.iter().copied().zip(self.pieces.iter()).filter(|(_, p)| p.horizon() > 0.0)
    }

    /// Appends `piece`, which must start at the current end value.
    pub fn push(&mut self, piece: ClosedForm) -> Result<()> {
        let (end, start) = (self.end_value(), piece.value(0.0));
        if (end - start).abs() > 1e-9 * (1.0 + end.abs()) {
            return Err(Error::Discontinuous { left: end, right: start });
        }
        if !(piece.horizon() > 0.0) {
            return Err(invalid("piece must have positive duration"));
        }
        let t = self.horizon();
        if self.pieces.len() == 1 && self.pieces[0].horizon() == 0.0 {
            self.pieces[0] = piece;
        } else {
            self.starts.push(t);
            self.pieces.push(piece);
        }
        Ok(())
    }

    pub fn end_value(&self) -> f64 {
        let last = self.pieces.last().expect("non-empty");
        last.value_before_end(0.0)
    }

    fn piece_at(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }
}

impl Driver for PiecewiseDriver {
    fn horizon(&self) -> f64 {
        self.starts.last().unwrap() + self.pieces.last().unwrap().horizon()
    }

    fn value(&self, t: f64) -> f64 {
        let k = self.piece_at(t);
        let p = &self.pieces[k];
        p.value((t - self.starts[k]).min(p.horizon()))
    }

    fn next_knot(&self, t: f64) -> Option<f64> {
        self.starts.iter().copied().find(|&s| s > t)
    }

    fn value_before_end(&self, u: f64) -> f64 {
        let last = self.pieces.last().unwrap();
        if u <= last.horizon() {
            last.value_before_end(u)
        } else {
            self.value(self.horizon() - u)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StageKind {
    /// Already within half the tolerance of the trace.
    Skipped,
    Vertical,
    Segment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub index: usize,
    pub kind: StageKind,
    /// Image of the point relative to the tip before waiting.
    pub image: [f64; 2],
    pub wait: f64,
    pub duration: f64,
    /// Capacity at the end of the stage.
    pub time: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseOptions {
    pub tol: f64,
    /// Steps per constant piece.
    pub wait_steps: usize,
    /// Resolution of the base arc, see [`build_base_family`].
    pub base_resolution: usize,
}

impl DenseOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, wait_steps: 200, base_resolution: 1000 }
    }
}

#[derive(Debug, Clone)]
pub struct DenseBuild {
    pub driver: PiecewiseDriver,
    pub stages: Vec<StageReport>,
    /// Slit steps discretizing `driver`; their tips form `trace`.
    pub chain: SlitMapChain,
    pub trace: Trace,
    /// `driver` sampled at the trace times.
    pub sampled: DrivingFunction,
    pub norm: NormReport,
}

/// Builds a driver starting at 0 whose trace visits `points` in order.
pub fn build_dense_driver(points: &[HalfPlanePoint], opts: &DenseOptions) -> Result<DenseBuild> {
    let family = build_base_family(opts.base_resolution, 512)?;
    build_dense_driver_with(points, opts, &family)
}

/// Chain and its tips, grown step by step.
struct Growing {
    chain: SlitMapChain,
    tips: Vec<Complex64>,
}

impl Growing {
    fn extend(&mut self, steps: &[SlitStep]) -> Result<()> {
        let first = self.chain.len();
        for s in steps {
            self.chain.push(*s)?;
        }
        let chain = &self.chain;
        let new: Vec<Complex64> = (first + 1..=chain.len())
            .into_par_iter()
            .map(|k| {
                let z = chain.inverse_prefix(Complex64::new(chain.steps()[k - 1].x, 0.0), k);
                Complex64::new(z.re, z.im.max(0.0))
            })
            .collect();
        self.tips.extend(new);
        Ok(())
    }

    fn distance(&self, z: Complex64) -> f64 {
        Polyline::new(self.tips.clone()).distance_to(z)
    }

    /// Image of `z` relative to `x`; fails if `z` has been swallowed.
    fn image(&self, z: HalfPlanePoint, x: f64) -> Result<Complex64> {
        let w = self.chain.forward(z.to_complex()) - x;
        if !(w.im > 0.0) {
            return Err(invalid(format!("target {z:?} is no longer in the domain (image {w})")));
        }
        Ok(w)
    }

    /// Trace with vertices of coinciding float times merged into the last of them.
    fn trace(&self) -> Result<Trace> {
        let mut vertices = Vec::with_capacity(self.tips.len());
        let mut times: Vec<f64> = Vec::with_capacity(self.tips.len());
        for (k, (z, t)) in self.tips.iter().zip(self.chain.times()).enumerate() {
            let v = HalfPlanePoint::try_from_complex(*z)?;
            if k > 0 && t <= *times.last().unwrap() {
                *vertices.last_mut().unwrap() = v;
                continue;
            }
            vertices.push(v);
            times.push(t);
        }
        Trace::new(vertices, times)
    }
}

/// As [`build_dense_driver`], with a prebuilt base family.
pub fn build_dense_driver_with(points: &[HalfPlanePoint], opts: &DenseOptions, family: &BaseFamily) -> Result<DenseBuild> {
    if points.is_empty() {
        return Err(invalid("need at least one point"));
    }
    if !(opts.tol > 0.0) || opts.wait_steps == 0 {
        return Err(invalid("need a positive tolerance and at least one wait step"));
    }
    if let Some(k) = points.iter().position(|p| !(p.im > 0.0)) {
        return Err(invalid(format!("point {k} is not in the open upper half-plane")));
    }
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(invalid(format!("points {j} and {i} coincide")));
            }
        }
    }

    let mut driver = PiecewiseDriver::new(0.0);
    let mut grow = Growing { chain: SlitMapChain::new(), tips: vec![Complex64::new(0.0, 0.0)] };
    let mut stages = Vec::with_capacity(points.len());
    for (index, &z) in points.iter().enumerate() {
        let t_n = driver.horizon();
        if !grow.chain.is_empty() {
            let d = grow.distance(z.to_complex());
            if d <= opts.tol / 2.0 {
                stages.push(StageReport {
                    index,
                    kind: StageKind::Skipped,
                    image: [f64::NAN, f64::NAN],
                    wait: 0.0,
                    duration: 0.0,
                    time: t_n,
                    distance: d,
                });
                continue;
            }
        }
        let x = driver.end_value();
        // Targets enclosed so tightly that their image is real in floating point, or
        // becomes real while waiting, cannot be reached at this precision.
        let unreachable = |grow: &Growing| Error::NotVisited {
            index,
            distance: grow.distance(z.to_complex()),
            tol: opts.tol,
        };
        let w = grow.image(z, x).map_err(|_| unreachable(&grow))?;
        let vertical = w.re.abs() <= 1e-12 * w.norm();
        let wait = if vertical {
            0.0
        } else {
            waiting_time(t_n, w, family).map_err(|e| match e {
                Error::IterationCap(_) => unreachable(&grow),
                e => e,
            })?
        };
        let target = if wait > 0.0 {
            driver.push(ClosedForm::Constant { c: x, horizon: wait })?;
            grow.extend(&constant_steps(x, wait, opts.wait_steps))?;
            grow.image(z, x).map_err(|_| unreachable(&grow))?
        } else {
            w
        };
        let seg = segment_driver(x, target, family, opts.wait_steps)?;
        driver.push(seg.driver)?;
        grow.extend(&seg.steps)?;
        stages.push(StageReport {
            index,
            kind: if vertical { StageKind::Vertical } else { StageKind::Segment },
            image: [w.re, w.im],
            wait,
            duration: seg.duration,
            time: driver.horizon(),
            distance: (grow.tips.last().unwrap() - z.to_complex()).norm(),
        });
    }
    let trace = grow.trace()?;
    let curve = trace.polyline();
    let misses: Vec<(usize, f64)> = points
        .par_iter()
        .enumerate()
        .map(|(k, p)| (k, curve.distance_to(p.to_complex())))
        .filter(|&(_, d)| d > opts.tol)
        .collect();
    if let Some(&(index, distance)) = misses.first() {
        return Err(Error::NotVisited { index, distance, tol: opts.tol });
    }
    let sampled = DrivingFunction::sample(&driver, trace.times.clone())?;
    let norm = lip_norm_estimate(&sampled, DEFAULT_PAIR_BUDGET);
    Ok(DenseBuild { driver, stages, chain: grow.chain, trace, sampled, norm })
}

/// Distances from each point to `curve`.
pub fn visit_distances(points: &[HalfPlanePoint], curve: &Polyline) -> Vec<f64> {
    points.iter().map(|p| curve.distance_to(p.to_complex())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn family() -> &'static BaseFamily {
        static F: OnceLock<BaseFamily> = OnceLock::new();
        F.get_or_init(|| build_base_family(1000, 512).unwrap())
    }

    fn tip_of(x: f64, steps: &[SlitStep]) -> Complex64 {
        let chain = SlitMapChain::from_steps(steps.to_vec()).unwrap();
        chain.tips(x).last().copied().unwrap()
    }

    #[test]
    fn base_family_lands_near_two() {
        let f = family();
        assert!((f.landing() - 2.0).norm() < 5e-2, "{}", f.landing());
        assert_eq!(f.base_trace.vertices[0].to_complex(), Complex64::new(0.0, 0.0));
        assert!(f.r_min > 0.0);
        let small = f.ray(1e-3).unwrap();
        assert!((small.r - 2.0).abs() < 5e-2 && small.tau > 0.99);
        assert!(f.ray_table.iter().all(|e| e.r >= f.r_min && e.r < 3.0 && e.tau > 0.0 && e.tau <= 1.0));
        assert!(f.ray(1.2).is_err() && f.ray(0.0).is_err());
        assert!(f.min_angle() < 1e-2, "{}", f.min_angle());
    }

    #[test]
    fn ray_hits_lie_on_the_ray() {
        let f = family();
        for e in &f.ray_table {
            let p = Complex64::from_polar(e.r, e.theta);
            assert!(Polyline::new(f.tips.clone()).distance_to(p) < 1e-9);
        }
    }

    #[test]
    fn exact_hits_have_the_requested_angle() {
        let f = family();
        for theta in [1.0, 0.5, 1e-1, 1e-2, 6e-3] {
            let h = f.hit(theta).unwrap();
            assert!((h.tip.im.atan2(h.tip.re) - theta).abs() < 1e-12 * (1.0 + 1.0 / theta), "{theta}");
            let e = f.ray(theta).unwrap();
            assert!((h.tip.norm() - e.r).abs() < 1e-2, "{theta}: {} vs {}", h.tip.norm(), e.r);
        }
        let tail = f.hit(f.min_angle() / 2.0).unwrap();
        assert_eq!(tail.partial, 0.0);
        assert!(tail.tip.im.atan2(tail.tip.re) <= f.min_angle() / 2.0);
    }

    #[test]
    fn vertical_and_near_real_segments() {
        let f = family();
        let s = segment_driver(0.0, Complex64::new(0.0, 1.0), f, 10).unwrap();
        assert_eq!(s.driver, ClosedForm::Constant { c: 0.0, horizon: 0.25 });
        assert_eq!(s.steps.len(), 10);
        let s = segment_driver(0.0, Complex64::new(2.0, 1e-4), f, 10).unwrap();
        assert!((s.duration - 1.0).abs() < 5e-2, "{}", s.duration);
        assert!(matches!(segment_driver(0.0, Complex64::new(0.1, 1.0), f, 10), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn segment_steps_reach_the_target() {
        let f = family();
        for w in [Complex64::new(1.0, 0.5), Complex64::new(-0.7, 0.3), Complex64::new(0.3, 0.5), Complex64::new(5.0, 0.04)] {
            let s = segment_driver(0.4, w, f, 10).unwrap();
            let end = tip_of(0.4, &s.steps);
            assert!((end - (0.4 + w)).norm() < 1e-7 * w.norm(), "{w}: {end}");
            let total: f64 = s.steps.iter().map(|p| p.dt).sum();
            assert!((total - s.duration).abs() < 1e-12 * s.duration);
            let last = s.steps.last().unwrap();
            assert!((last.x - s.driver.value_before_end(0.5 * last.dt)).abs() < 1e-6);
        }
    }

    #[test]
    fn mirror_segment_is_the_reflection() {
        let f = family();
        let a = segment_driver(0.0, Complex64::new(1.0, 0.5), f, 10).unwrap();
        let b = segment_driver(0.0, Complex64::new(-1.0, 0.5), f, 10).unwrap();
        assert!((a.duration - b.duration).abs() < 1e-14);
        for (p, q) in a.steps.iter().zip(&b.steps) {
            assert!((p.x + q.x).abs() < 1e-12 && p.dt == q.dt);
        }
    }

    #[test]
    fn waiting_examples() {
        let f = family();
        assert_eq!(waiting_time(0.0, Complex64::new(1.0, 0.5), f).unwrap(), 0.0);
        let w = Complex64::new(0.1, 1.0);
        let tau = waiting_time(0.0, w, f).unwrap();
        assert!(tau > 0.0 && folded_angle(waited_image(w, tau)).0 <= WINDOW);
        let t_n = 0.8;
        let tau = waiting_time(t_n, w, f).unwrap();
        let v = waited_image(w, tau);
        let ray = f.ray(folded_angle(v).0).unwrap();
        let sigma = (v.norm() / ray.r).powi(2) * ray.tau;
        assert!(4.0 * t_n * sigma <= tau * tau);
        assert!(4.0 * t_n * sigma > (tau / SAFETY / 1.01).powi(2), "not minimal");
    }

    #[test]
    fn waiting_decreases_the_angle() {
        let w = Complex64::new(0.2, 1.3);
        let angles: Vec<f64> = (0..200).map(|k| folded_angle(waited_image(w, 0.05 * k as f64)).0).collect();
        assert!(angles.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn waiting_steps_compose_to_the_waited_image() {
        let w = Complex64::new(0.6, 0.9);
        let chain = SlitMapChain::from_steps(constant_steps(0.3, 0.7, 50)).unwrap();
        let moved = chain.forward(0.3 + w) - 0.3;
        assert!((moved - waited_image(w, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn single_and_collinear_points() {
        let opts = DenseOptions::new(1e-2);
        let f = family();
        let b = build_dense_driver_with(&[HalfPlanePoint::new(0.0, 1.0).unwrap()], &opts, f).unwrap();
        assert_eq!(b.driver.horizon(), 0.25);
        assert!(b.sampled.values().iter().all(|&v| v == 0.0));

        let pts = [HalfPlanePoint::new(0.0, 1.0).unwrap(), HalfPlanePoint::new(0.0, 2.0).unwrap()];
        let b = build_dense_driver_with(&pts, &opts, f).unwrap();
        assert!((b.driver.horizon() - 1.0).abs() < 1e-9, "{}", b.driver.horizon());
        assert!(b.sampled.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_points_are_hit_exactly() {
        let pts = [HalfPlanePoint::new(-0.39, 0.62).unwrap(), HalfPlanePoint::new(0.39, 0.83).unwrap()];
        let b = build_dense_driver_with(&pts, &DenseOptions::new(1e-3), family()).unwrap();
        assert!(b.stages.iter().all(|s| s.distance < 1e-8), "{:?}", b.stages);
        assert!((b.chain.total_capacity() - b.driver.horizon()).abs() < 1e-9 * b.driver.horizon());
    }

    #[test]
    fn rejects_bad_points() {
        let opts = DenseOptions::new(1e-2);
        let f = family();
        assert!(build_dense_driver_with(&[], &opts, f).is_err());
        assert!(build_dense_driver_with(&[HalfPlanePoint::real(1.0)], &opts, f).is_err());
        let p = HalfPlanePoint::new(0.3, 1.0).unwrap();
        assert!(build_dense_driver_with(&[p, p], &opts, f).is_err());
    }
}
