//! Slit-map chains and trace computation.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::driver::Driver;
use super::slit::{slit_forward, slit_forward_sided, slit_inverse, SlitSide};
use crate::error::{invalid, Error, Result};
use crate::geometry::{HalfPlanePoint, Polyline};

/// One elementary map: vertical slit at `x` of capacity `dt` (height `2√dt`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitStep {
    pub x: f64,
    pub dt: f64,
}

impl SlitStep {
    pub fn height(&self) -> f64 {
        2.0 * self.dt.sqrt()
    }
}

/// Composition `h_n ∘ … ∘ h_1` of vertical-slit maps, discretizing `g_t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SlitMapChain {
    steps: Vec<SlitStep>,
    total: f64,
}

impl SlitMapChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<SlitStep>) -> Result<Self> {
        let mut chain = Self::new();
        for s in steps {
            chain.push(s)?;
        }
        Ok(chain)
    }

    pub fn push(&mut self, step: SlitStep) -> Result<()> {
        if !(step.dt > 0.0) || !step.dt.is_finite() || !step.x.is_finite() {
            return Err(invalid(format!("slit step needs finite x and dt > 0, got {step:?}")));
        }
        self.steps.push(step);
        self.total += step.dt;
        Ok(())
    }

    pub fn steps(&self) -> &[SlitStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Half-plane capacity, accumulated in step order.
    pub fn total_capacity(&self) -> f64 {
        self.total
    }

    /// Capacity times `0, t_1, …, t_n` at the ends of the steps.
    pub fn times(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.steps.iter().map(|s| {
                acc += s.dt;
                acc
            }))
            .collect()
    }

    /// `g(z)` through all steps.
    pub fn forward(&self, z: Complex64) -> Complex64 {
        self.steps.iter().fold(z, |w, s| slit_forward(w, s.x, s.height()))
    }

    /// `g(z)` for a point that may lie on erased slits; the side is kept from the
    /// point's position relative to each slit just before it is erased.
    pub fn forward_sided(&self, z: Complex64, side: SlitSide) -> Complex64 {
        self.steps.iter().fold(z, |w, s| slit_forward_sided(w, s.x, s.height(), side))
    }

    /// `g⁻¹(w)` through the first `k` steps.
    pub fn inverse_prefix(&self, w: Complex64, k: usize) -> Complex64 {
        self.steps[..k].iter().rev().fold(w, |z, s| slit_inverse(z, s.x, s.height()))
    }

    pub fn inverse(&self, w: Complex64) -> Complex64 {
        self.inverse_prefix(w, self.steps.len())
    }

    /// Tips of the hulls after each step, starting from `start` on the real line.
    pub fn tips(&self, start: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = (0..=self.steps.len())
            .into_par_iter()
            .map(|k| {
                if k == 0 {
                    Complex64::new(start, 0.0)
                } else {
                    self.inverse_prefix(Complex64::new(self.steps[k - 1].x, 0.0), k)
                }
            })
            .collect();
        for z in &mut out {
            z.im = z.im.max(0.0);
        }
        out
    }

    /// Chain of the first `k` steps.
    pub fn prefix(&self, k: usize) -> Self {
        let steps = self.steps[..k].to_vec();
        let total = steps.iter().map(|s| s.dt).sum();
        Self { steps, total }
    }
}

/// Discrete trace: vertices with their capacity times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub vertices: Vec<HalfPlanePoint>,
    pub times: Vec<f64>,
}

impl Trace {
    pub fn new(vertices: Vec<HalfPlanePoint>, times: Vec<f64>) -> Result<Self> {
        if vertices.len() != times.len() || vertices.is_empty() {
            return Err(invalid("trace needs matching, non-empty vertex and time lists"));
        }
        if vertices[0].im != 0.0 {
            return Err(invalid("trace must start on the real axis"));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("trace times must increase strictly from 0"));
        }
        Ok(Self { vertices, times })
    }

    pub fn polyline(&self) -> Polyline {
        Polyline::new(self.vertices.iter().map(|v| v.to_complex()).collect())
    }

    pub fn last(&self) -> HalfPlanePoint {
        *self.vertices.last().expect("non-empty")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    pub fn max_im(&self) -> f64 {
        self.vertices.iter().map(|v| v.im).fold(0.0, f64::max)
    }
}

/// How substeps are distributed over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grading {
    Uniform,
    /// Power-law clustering (exponent ≥ 1) toward the given times in `(0, T]`.
    Power { singular_times: Vec<f64>, exponent: f64 },
    /// Step size proportional to the time left: `T - t_k = T e^{-depth·k/n}`, then one
    /// final step to `T`. Suited to square-root singularities at the horizon.
    Geometric { depth: f64 },
}

/// Where each substep samples the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    RightEndpoint,
    /// Second-order in the time-changed picture; the geometric tail needs it to land
    /// square-root singular traces correctly.
    Midpoint,
}

/// Substep layout for [`solve_trace`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepPolicy {
    pub steps: usize,
    pub grading: Grading,
    pub sampling: Sampling,
    /// Largest allowed distance between consecutive vertices.
    pub max_vertex_gap: Option<f64>,
}

/// One substep: its capacity and where the driver is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Substep {
    pub dt: f64,
    /// Right endpoint.
    pub t_end: f64,
    /// Sample time.
    pub t_eval: f64,
    /// Sample point as time left before the horizon, when that is the exact quantity.
    pub u_eval: Option<f64>,
}

impl StepPolicy {
    pub fn uniform(steps: usize) -> Self {
        Self { steps, grading: Grading::Uniform, sampling: Sampling::RightEndpoint, max_vertex_gap: None }
    }

    /// Steps clustered at `t_sing` with exponent 3.
    pub fn singular_at(steps: usize, t_sing: f64) -> Self {
        Self {
            steps,
            grading: Grading::Power { singular_times: vec![t_sing], exponent: 3.0 },
            sampling: Sampling::RightEndpoint,
            max_vertex_gap: None,
        }
    }

    /// Steps proportional to the time left, reaching `T e^{-depth}` before the last step,
    /// with midpoint sampling.
    pub fn geometric(steps: usize, depth: f64) -> Self {
        Self { steps, grading: Grading::Geometric { depth }, sampling: Sampling::Midpoint, max_vertex_gap: None }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_max_gap(mut self, gap: f64) -> Self {
        self.max_vertex_gap = Some(gap);
        self
    }

    /// Substeps covering `[0, horizon]`.
    pub fn substeps(&self, horizon: f64) -> Result<Vec<Substep>> {
        if self.steps == 0 {
            return Err(invalid("need at least one step"));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        match &self.grading {
            Grading::Geometric { depth } => {
                if !(*depth > 0.0) || !depth.is_finite() {
                    return Err(invalid("geometric depth must be positive"));
                }
                let n = self.steps;
                let u: Vec<f64> = (0..=n).map(|k| horizon * (-depth * k as f64 / n as f64).exp()).collect();
                let mid = self.sampling == Sampling::Midpoint;
                let mut out: Vec<Substep> = u
                    .windows(2)
                    .map(|w| {
                        let ue = if mid { 0.5 * (w[0] + w[1]) } else { w[1] };
                        Substep { dt: w[0] - w[1], t_end: horizon - w[1], t_eval: horizon - ue, u_eval: Some(ue) }
                    })
                    .collect();
                let ue = if mid { 0.5 * u[n] } else { 0.0 };
                out.push(Substep { dt: u[n], t_end: horizon, t_eval: horizon - ue, u_eval: Some(ue) });
                Ok(out)
            }
            _ => {
                let grid = self.grid(horizon)?;
                Ok(grid_substeps(&grid, self.sampling))
            }
        }
    }

    /// Time grid `0 = t_0 < … < t_n = horizon`. Geometric tails are truncated where
    /// consecutive times coincide in floating point.
    pub fn grid(&self, horizon: f64) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(invalid("need at least one step"));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        let uniform = || (0..=self.steps).map(|k| horizon * k as f64 / self.steps as f64).collect();
        let (singular_times, exponent) = match &self.grading {
            Grading::Uniform => return Ok(uniform()),
            Grading::Geometric { .. } => {
                let mut grid = vec![0.0];
                for s in self.substeps(horizon)? {
                    if s.t_end > *grid.last().unwrap() {
                        grid.push(s.t_end);
                    }
                }
                return Ok(grid);
            }
            Grading::Power { singular_times, exponent } => (singular_times, *exponent),
        };
        if !(exponent >= 1.0) {
            return Err(invalid("grading exponent must be at least 1"));
        }
        let mut sing: Vec<f64> = singular_times.iter().copied().filter(|&s| s > 0.0 && s <= horizon).collect();
        sing.sort_by(f64::total_cmp);
        sing.dedup();
        if sing.is_empty() || exponent == 1.0 {
            return Ok(uniform());
        }
        // Pieces between consecutive singular times; each graded toward the ends it touches.
        let mut cuts = vec![0.0];
        cuts.extend(sing.iter().copied());
        if *cuts.last().unwrap() < horizon {
            cuts.push(horizon);
        }
        let mut grid = vec![0.0];
        for p in 0..cuts.len() - 1 {
            let (a, b) = (cuts[p], cuts[p + 1]);
            let left = p > 0;
            let right = sing.contains(&b);
            let share = ((self.steps as f64) * (b - a) / horizon).round().max(1.0) as usize;
            for k in 1..=share {
                let u = k as f64 / share as f64;
                let v = match (left, right) {
                    (false, true) => 1.0 - (1.0 - u).powf(exponent),
                    (true, false) => u.powf(exponent),
                    (true, true) => {
                        if u <= 0.5 {
                            0.5 * (2.0 * u).powf(exponent)
                        } else {
                            1.0 - 0.5 * (2.0 - 2.0 * u).powf(exponent)
                        }
                    }
                    (false, false) => u,
                };
                let t = if k == share { b } else { a + (b - a) * v };
                if t > *grid.last().unwrap() {
                    grid.push(t);
                }
            }
        }
        Ok(grid)
    }
}

fn grid_substeps(grid: &[f64], sampling: Sampling) -> Vec<Substep> {
    grid.windows(2)
        .map(|w| {
            let t_eval = match sampling {
                Sampling::RightEndpoint => w[1],
                Sampling::Midpoint => 0.5 * (w[0] + w[1]),
            };
            Substep { dt: w[1] - w[0], t_end: w[1], t_eval, u_eval: None }
        })
        .collect()
}

/// Slit-map chain for `driver` on the given grid, using right-endpoint values.
pub fn chain_on_grid(driver: &impl Driver, grid: &[f64]) -> Result<SlitMapChain> {
    chain_on_substeps(driver, &grid_substeps(grid, Sampling::RightEndpoint))
}

/// Slit-map chain for explicit substeps.
pub fn chain_on_substeps(driver: &impl Driver, subs: &[Substep]) -> Result<SlitMapChain> {
    let mut chain = SlitMapChain::new();
    for s in subs {
        let x = match s.u_eval {
            Some(u) => driver.value_before_end(u),
            None => driver.value(s.t_eval),
        };
        if !x.is_finite() {
            return Err(Error::NonFinite { t: s.t_end });
        }
        chain.push(SlitStep { x, dt: s.dt })?;
    }
    Ok(chain)
}

/// Trace of `driver` on `[0, T]` by composing inverse vertical-slit maps.
///
/// Vertex `k` is `h_1⁻¹ ∘ … ∘ h_k⁻¹(x_k)`, the tip after `k` substeps. Substeps whose end
/// times coincide in floating point are merged into the last of them.
pub fn solve_trace(driver: &impl Driver, policy: &StepPolicy) -> Result<Trace> {
    let subs = policy.substeps(driver.horizon())?;
    let chain = chain_on_substeps(driver, &subs)?;
    let times: Vec<f64> = std::iter::once(0.0).chain(subs.iter().map(|s| s.t_end)).collect();
    trace_from_chain(&chain, driver.value(0.0), &times, policy.max_vertex_gap)
}

/// Trace on an explicit time grid starting at 0.
pub fn solve_trace_on_grid(driver: &impl Driver, grid: &[f64], max_gap: Option<f64>) -> Result<Trace> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(invalid("grid must start at 0 and have at least two points"));
    }
    let chain = chain_on_grid(driver, grid)?;
    trace_from_chain(&chain, driver.value(0.0), grid, max_gap)
}

/// Trace for explicit substeps, which must tile `[0, T]` in order.
pub fn solve_trace_on_substeps(driver: &impl Driver, subs: &[Substep], max_gap: Option<f64>) -> Result<Trace> {
    if subs.is_empty() {
        return Err(invalid("need at least one substep"));
    }
    let chain = chain_on_substeps(driver, subs)?;
    let times: Vec<f64> = std::iter::once(0.0).chain(subs.iter().map(|s| s.t_end)).collect();
    trace_from_chain(&chain, driver.value(0.0), &times, max_gap)
}

fn trace_from_chain(chain: &SlitMapChain, start: f64, times: &[f64], max_gap: Option<f64>) -> Result<Trace> {
    let tips = chain.tips(start);
    if let Some(limit) = max_gap {
        if let Some(index) = tips.windows(2).position(|w| (w[1] - w[0]).norm() > limit) {
            return Err(Error::TraceTooCoarse { index, gap: (tips[index + 1] - tips[index]).norm(), limit });
        }
    }
    let mut vertices: Vec<HalfPlanePoint> = Vec::with_capacity(tips.len());
    let mut kept: Vec<f64> = Vec::with_capacity(tips.len());
    for (k, (z, &t)) in tips.iter().zip(times).enumerate() {
        let v = HalfPlanePoint::try_from_complex(*z).map_err(|_| Error::BranchFailure { index: k, im: z.im })?;
        if k > 0 && t <= *kept.last().unwrap() {
            *vertices.last_mut().unwrap() = v;
            continue;
        }
        vertices.push(v);
        kept.push(t);
    }
    if vertices.len() < 2 {
        return Err(invalid("trace collapsed to a single vertex"));
    }
    Trace::new(vertices, kept)
}
