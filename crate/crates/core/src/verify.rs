//! Acceptance criteria as runnable checks, shared by the `verify` subcommand and the
//! acceptance test target.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{check_capacity_bounds, lip_norm_estimate, relative_self_similarity, DEFAULT_PAIR_BUDGET};
use crate::capture::{capture_scan, fixed_points, flow_x, phase_inequality_margin, phase_margin_check, FlowOptions, Trend};
use crate::dense::{build_dense_driver, DenseOptions};
use crate::error::{invalid, Error, Result};
use crate::fractal::{koch_standing, limit_area, positive_area_curve};
use crate::geometry::{HalfPlanePoint, Polyline};
use crate::loewner::{
    evolve_point, solve_trace, ClosedForm, Driver, DrivingFunction, Evolution, FnDriver, StepPolicy, Trace,
};
use crate::welding::{extract_driving, refine_polyline, round_trip_residual, WeldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Core,
    Welding,
    Capture,
    Dense,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Core => &[1, 2, 6, 10, 11],
            Suite::Welding => &[7, 8],
            Suite::Capture => &[3, 4, 5],
            Suite::Dense => &[9],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "core" => Suite::Core,
            "welding" => Suite::Welding,
            "capture" => Suite::Capture,
            "dense" => Suite::Dense,
            "all" => Suite::All,
            other => return Err(invalid(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {:>2} {}: {} [{:.3} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects sub-checks; the criterion passes when all of them do.
struct Checks {
    ok: bool,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.ok &= ok;
        self.notes.push(if ok { note } else { format!("NOT {note}") });
    }

    fn runtime(&mut self, start: Instant, limit: Duration) {
        let used = start.elapsed();
        self.check(used < limit, format!("runtime {:.3} s < {:.3} s", used.as_secs_f64(), limit.as_secs_f64()));
    }
}

fn finish(id: u8, name: &'static str, start: Instant, body: Result<Checks>) -> Outcome {
    let elapsed = start.elapsed();
    match body {
        Ok(c) => Outcome { id, name, passed: c.ok, detail: c.notes.join("; "), elapsed },
        Err(e) => Outcome { id, name, passed: false, detail: format!("error: {e}"), elapsed },
    }
}

/// Runs one criterion by number.
pub fn run_criterion(id: u8, seed: u64) -> Outcome {
    let start = Instant::now();
    let (name, body) = match id {
        1 => ("vertical slit", vertical_slit(start)),
        2 => ("bubble landing", bubble_landing(start)),
        3 => ("phase margin", phase_margin(start)),
        4 => ("fixed points and flow", fixed_points_and_flow(start)),
        5 => ("capture structure", capture_structure(start)),
        6 => ("capacity bounds sweep", capacity_sweep(start, seed)),
        7 => ("welding round trip", welding_round_trip(start)),
        8 => ("koch self-similarity", koch_similarity(start)),
        9 => ("dense builder", dense_builder(start, seed)),
        10 => ("positive-area identities", positive_area(start)),
        11 => ("symmetry invariants", symmetry(start)),
        _ => ("unknown", Err(invalid(format!("no criterion {id}")))),
    };
    finish(id, name, start, body)
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<Outcome> {
    suite.criteria().iter().map(|&id| run_criterion(id, seed)).collect()
}

fn vertical_slit(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let zero = DrivingFunction::constant(0.0, 1.0)?;
    let tip = solve_trace(&zero, &StepPolicy::uniform(1000))?.last().to_complex();
    let d = (tip - Complex64::new(0.0, 2.0)).norm();
    c.check(d < 1e-2, format!("trace tip {tip:.6} within 1e-2 of 2i ({d:.2e})"));
    match evolve_point(&zero, HalfPlanePoint::new(0.0, 1.0)?, 0.0, 1.0, 1e-12)? {
        Evolution::Alive(p) => {
            let d = (p.to_complex() - Complex64::new(3f64.sqrt(), 0.0)).norm();
            c.check(d < 1e-9, format!("g_1(i) within 1e-9 of √3 ({d:.2e})"));
        }
        other => c.check(false, format!("g_1(i) alive (got {other:?})")),
    }
    c.runtime(start, Duration::from_secs(1));
    Ok(c)
}

fn bubble_landing(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let trace = solve_trace(&ClosedForm::Bubble { c: 4.0 }, &StepPolicy::geometric(4800, 120.0))?;
    let end = trace.last().to_complex();
    let d = (end - 2.0).norm();
    c.check(d < 5e-2, format!("end {end:.5} within 5e-2 of 2 ({d:.3e})"));
    c.runtime(start, Duration::from_secs(10));
    Ok(c)
}

fn phase_margin(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let m = phase_inequality_margin(3.5, 0.00005)?;
    c.check(m > -0.126 && m < -0.125, format!("margin {m:.15} in (-0.126, -0.125)"));
    let check = phase_margin_check(3.5, 0.00005, 1.0, 1.0)?;
    c.check(check.max_deviation < 1e-9, format!("unfactored deviation {:.2e} < 1e-9", check.max_deviation));
    c.runtime(start, Duration::from_millis(1));
    Ok(c)
}

/// Trend predicted from the position of `x` among `B`, `A` and `σ`.
fn predicted_trend(sigma: f64, x: f64) -> Trend {
    let fp = fixed_points(sigma);
    if sigma < 4.0 {
        return if x < sigma { Trend::Decreasing } else { Trend::Increasing };
    }
    if x < fp.b || (x > fp.a && x < sigma) {
        Trend::Decreasing
    } else {
        Trend::Increasing
    }
}

fn fixed_points_and_flow(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let fp = fixed_points(5.0);
    c.check(
        (fp.a - 4.0).abs() <= 1e-12 && (fp.b - 1.0).abs() <= 1e-12,
        format!("fixed_points(5) = ({}, {})", fp.a, fp.b),
    );
    let opts = FlowOptions::default();
    let mut mismatches = Vec::new();
    for sigma in [5.0, 3.6] {
        for k in 0..50 {
            let x0 = -3.0 + 10.0 * (k as f64 + 0.5) / 50.0;
            let expected = predicted_trend(sigma, x0);
            let got = flow_x(|_| sigma, x0, 1.0, &opts)?.trend();
            if got != Some(expected) {
                mismatches.push(format!("σ={sigma} x0={x0}: {got:?}"));
            }
        }
    }
    c.check(mismatches.is_empty(), format!("sign table on 2 × 50 grid ({} mismatches {:?})", mismatches.len(), mismatches));
    c.runtime(start, Duration::from_secs(1));
    Ok(c)
}

fn capture_structure(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let five = ClosedForm::Bubble { c: 5.0 };
    let inside = capture_scan(&five, 4.1, 4.9, 9, 1e-9)?;
    let by_one = inside.captured.iter().filter(|r| r.capture_time <= 1.0 + 1e-9).count();
    c.check(by_one == 9, format!("{by_one}/9 of 4.1..4.9 captured by t = 1"));
    let outside = capture_scan(&five, 0.1, 0.9, 9, 1e-9)?;
    c.check(outside.captured.is_empty(), format!("{} of 0.1..0.9 captured", outside.captured.len()));
    // Points of (A, σ) for σ = 4.5 are the ones captured.
    let scan = capture_scan(&ClosedForm::Bubble { c: 4.5 }, 3.4, 4.4, 11, 1e-9)?;
    let times: Vec<f64> = scan.captured.iter().map(|r| r.capture_time).collect();
    c.check(
        scan.captured.len() >= 2 && scan.strictly_monotone(),
        format!("capture times strictly monotone for 4.5√(1-t) ({} captured, times {:?})", times.len(), times),
    );
    c.runtime(start, Duration::from_secs(30));
    Ok(c)
}

/// Random driver `a√t + b sin(ωt + φ) + k t` on `[0, T]`.
fn random_lip_driver(rng: &mut ChaCha8Rng) -> impl Driver {
    let a = rng.gen_range(-4.0..4.0);
    let b = rng.gen_range(-1.0..1.0);
    let w = rng.gen_range(0.5..8.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let k = rng.gen_range(-2.0..2.0);
    let horizon = rng.gen_range(0.25..2.0);
    FnDriver::new(horizon, move |t: f64| a * t.max(0.0).sqrt() + b * ((w * t + phi).sin() - phi.sin()) + k * t)
}

fn capacity_sweep(start: Instant, seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: (f64, f64) = (0.0, 0.0);
    let mut failures = 0;
    for _ in 0..100 {
        let d = random_lip_driver(&mut rng);
        let trace = solve_trace(&d, &StepPolicy::uniform(2000))?;
        let r = check_capacity_bounds(&d, &trace, 1e-3);
        worst = (worst.0.max(r.height_ratio), worst.1.max(r.displacement_ratio));
        failures += usize::from(!r.holds);
    }
    c.check(failures == 0, format!("100 drivers, worst ratios {:.6} / {:.6} ≤ 1 + 1e-3", worst.0, worst.1));
    c.runtime(start, Duration::from_secs(60));
    Ok(c)
}

fn welding_round_trip(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let drivers: Vec<(&str, DrivingFunction)> = vec![
        ("0", DrivingFunction::constant(0.0, 1.0)?),
        ("1", DrivingFunction::constant(1.0, 1.0)?),
        ("sin(10t)", DrivingFunction::from_fn(|t| (10.0 * t).sin(), 1.0, 100_000)?),
        ("4√(1-t) on [0,0.99]", DrivingFunction::from_fn(|t| 4.0 * (1.0 - t).sqrt(), 0.99, 100_000)?),
    ];
    for (name, d) in &drivers {
        let coarse = round_trip_residual(d, 10_000, 1e-3)?;
        let fine = round_trip_residual(d, 10_000, 5e-4)?;
        c.check(coarse < 0.05, format!("{name}: residual {coarse:.3e} < 0.05"));
        // A residual already at rounding level has nothing left to decrease.
        let decreased = fine < coarse || coarse < 1e-12;
        c.check(decreased, format!("{name}: halving delta gives {fine:.3e} vs {coarse:.3e}"));
    }
    c.runtime(start, Duration::from_secs(120));
    Ok(c)
}

fn koch_similarity(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let lambda = extract_driving(&koch_standing(6)?, 1.0)?;
    let rel = relative_self_similarity(&lambda, 3.0, 9.0)?;
    c.check(rel <= 0.05, format!("(3,9) residual {rel:.4} of the oscillation ≤ 0.05"));
    let norm = lip_norm_estimate(&lambda, DEFAULT_PAIR_BUDGET).estimate;
    c.check(norm < 4.0, format!("norm estimate {norm:.4} < 4"));
    c.runtime(start, Duration::from_secs(300));
    Ok(c)
}

/// `n` points drawn uniformly from `[-2, 2] × [0.5, 2]`.
pub fn random_points(seed: u64, n: usize) -> Vec<HalfPlanePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| HalfPlanePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0)).expect("finite"))
        .collect()
}

fn dense_builder(start: Instant, seed: u64) -> Result<Checks> {
    let mut c = Checks::new();
    let points = random_points(seed, 5);
    match build_dense_driver(&points, &DenseOptions::new(1e-2)) {
        Ok(b) => {
            c.check(b.norm.estimate <= 4.01, format!("norm estimate {:.5} ≤ 4.01", b.norm.estimate));
            let worst = crate::dense::visit_distances(&points, &b.trace.polyline()).into_iter().fold(0.0, f64::max);
            c.check(worst <= 1e-2, format!("all points within {worst:.2e} ≤ 1e-2"));
        }
        Err(e) => c.check(false, format!("build for 5 random points (seed {seed}): {e}")),
    }
    c.runtime(start, Duration::from_secs(300));
    Ok(c)
}

fn positive_area(_start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let eps: Vec<f64> = (1..=6).map(|k| 1.0 / ((k + 1) * (k + 1)) as f64).collect();
    let pa = positive_area_curve(6, &eps)?;
    let mut product = BigRational::one();
    let mut exact = true;
    for (family, &e) in pa.families.iter().zip(&eps) {
        product = product * (BigRational::one() - BigRational::from_float(e).expect("finite"));
        exact &= family.area() == product;
    }
    c.check(exact, "stage areas equal Π(1 - ε_j) exactly for levels 1..6");
    let many: Vec<f64> = (1..=1_000_000u64).map(|k| 1.0 / ((k + 1) * (k + 1)) as f64).collect();
    let limit = limit_area(&many)?;
    c.check((limit.value - 0.5).abs() < 1e-6, format!("limit area {:.10} within 1e-6 of 0.5", limit.value));
    Ok(c)
}

fn max_vertex_gap(a: &Trace, b: &Trace, map: impl Fn(Complex64) -> Complex64) -> f64 {
    if a.vertices.len() != b.vertices.len() {
        return f64::INFINITY;
    }
    a.vertices
        .iter()
        .zip(&b.vertices)
        .map(|(p, q)| (map(p.to_complex()) - q.to_complex()).norm())
        .fold(0.0, f64::max)
}

fn symmetry(start: Instant) -> Result<Checks> {
    let mut c = Checks::new();
    let base = DrivingFunction::from_fn(|t| 1.5 * (3.0 * t).sin() + t.sqrt(), 1.0, 4000)?;
    let policy = StepPolicy::uniform(2000);
    let trace = solve_trace(&base, &policy)?;
    let (r, x) = (1.7, -0.6);
    let scaled = solve_trace(&base.transform(r, 0.0, false)?, &policy)?;
    let d = max_vertex_gap(&trace, &scaled, |z| r * z);
    c.check(d < 1e-8, format!("scaling by {r}: {d:.2e}"));
    let shifted = solve_trace(&base.transform(1.0, x, false)?, &policy)?;
    let d = max_vertex_gap(&trace, &shifted, |z| z + x);
    c.check(d < 1e-8, format!("translation by {x}: {d:.2e}"));
    let reflected = solve_trace(&base.transform(1.0, 0.0, true)?, &policy)?;
    let d = max_vertex_gap(&trace, &reflected, |z| -z.conj());
    c.check(d < 1e-8, format!("reflection: {d:.2e}"));

    // Two stages: absorb the first part, then extract the images of the rest as a curve of
    // its own from the real line, and concatenate.
    let curve = refine_polyline(&Polyline::from_pairs(&[(0.0, 0.0), (0.3, 0.6), (-0.2, 1.1), (0.4, 1.5)]), 0.01)?;
    let one_shot = extract_driving(&curve, 1.0)?;
    let split = curve.len() / 2;
    let mut state = WeldState::new(&curve)?;
    state.absorb_until(split + 1)?;
    let first = state.driving()?;
    let rest = Polyline::new(
        std::iter::once(Complex64::new(first.end_value(), 0.0)).chain(state.pending().iter().copied()).collect(),
    );
    let second = extract_driving(&rest, 1.0)?;
    let joined = first.concat(&second, 1e-12)?;
    let dt = (joined.horizon() - one_shot.horizon()).abs();
    let dv = if joined.len() == one_shot.len() {
        joined.values().iter().zip(one_shot.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    c.check(dt < 1e-12 && dv < 1e-9, format!("two-stage extraction: capacity gap {dt:.2e}, value gap {dv:.2e}"));
    c.runtime(start, Duration::from_secs(120));
    Ok(c)
}
