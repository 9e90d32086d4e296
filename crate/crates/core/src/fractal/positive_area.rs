//! Nested-square construction of a curve of positive area.
//!
//! Each square of side `s` at stage `k - 1` holds four subsquares of side
//! `s √(1 - ε_k) / 2`, so they cover the fraction `1 - ε_k` of its area. Along each axis the
//! leftover width `w = s (1 - √(1 - ε_k))` splits into margins `w/4` at both ends and a
//! central corridor `w/2`. The layout is a product of one-dimensional layouts, so the
//! Hilbert symmetries map it to itself and the subsquares are visited in Hilbert order.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::hilbert::hilbert_centers;
use super::{check_level, FractalKind};
use crate::error::{invalid, Result};
use crate::geometry::Polyline;

/// The squares of one stage, listed in visiting order.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFamily {
    pub side: f64,
    /// Exact `side²` given the epsilons as exact binary fractions.
    pub side_squared: BigRational,
    /// Lower-left corners.
    pub corners: Vec<Complex64>,
}

impl SquareFamily {
    /// Exact total area.
    pub fn area(&self) -> BigRational {
        &self.side_squared * BigRational::from_integer(self.corners.len().into())
    }

    pub fn centres(&self) -> impl Iterator<Item = Complex64> + '_ {
        let h = self.side / 2.0;
        self.corners.iter().map(move |c| c + Complex64::new(h, h))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveArea {
    pub curve: Polyline,
    /// Stages `S_1, …, S_level`.
    pub families: Vec<SquareFamily>,
}

/// Stage-`level` approximation: a stem to the first square, then the centres of the
/// `4^level` stage squares in visiting order.
pub fn positive_area_curve(level: u32, epsilons: &[f64]) -> Result<PositiveArea> {
    if level == 0 {
        return Err(invalid("positive-area curve needs level >= 1"));
    }
    check_level(FractalKind::PositiveArea, level)?;
    if epsilons.len() < level as usize {
        return Err(invalid(format!("need {level} epsilons, got {}", epsilons.len())));
    }
    if let Some(e) = epsilons.iter().find(|e| !(0.0..1.0).contains(*e)) {
        return Err(invalid(format!("epsilons must lie in [0, 1), got {e}")));
    }

    // One-dimensional interval starts per stage.
    let mut starts = vec![0.0f64];
    let mut side = 1.0f64;
    let mut side_sq = BigRational::one();
    let mut families = Vec::with_capacity(level as usize);
    for (k, &eps) in epsilons.iter().take(level as usize).enumerate() {
        let child = side * (1.0 - eps).sqrt() / 2.0;
        let w = side - 2.0 * child;
        starts = starts.iter().flat_map(|&a| [a + w / 4.0, a + 0.75 * w + child]).collect();
        side = child;
        let exact_eps = BigRational::from_float(eps).expect("finite");
        side_sq = side_sq * (BigRational::one() - exact_eps) / BigRational::from_integer(4.into());
        let stage = k as u32 + 1;
        let corners = hilbert_centers(stage)
            .into_iter()
            .map(|(i, j)| Complex64::new(starts[i as usize], starts[j as usize]))
            .collect();
        families.push(SquareFamily { side, side_squared: side_sq.clone(), corners });
    }

    let last = families.last().expect("level >= 1");
    let centres: Vec<Complex64> = last.centres().collect();
    let mut pts = Vec::with_capacity(centres.len() + 1);
    pts.push(Complex64::new(centres[0].re, 0.0));
    pts.extend(centres);
    Ok(PositiveArea { curve: Polyline::new(pts), families })
}

/// Extrapolated value of `Π (1 - ε_k)` over the given terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitArea {
    pub value: f64,
    /// Partial product over all terms.
    pub partial: f64,
    /// Size of the extrapolation correction; an error estimate, not a bound.
    pub error: f64,
}

/// `Π (1 - ε_k)` over `epsilons`, with Aitken extrapolation from the partial products
/// at a quarter, half and all of the terms. Clamped to `[0, partial]`.
pub fn limit_area(epsilons: &[f64]) -> Result<LimitArea> {
    if let Some(e) = epsilons.iter().find(|e| !(0.0..1.0).contains(*e)) {
        return Err(invalid(format!("epsilons must lie in [0, 1), got {e}")));
    }
    let n = epsilons.len();
    // Sum of logs keeps long products accurate.
    let mut log = 0.0f64;
    let mut marks = [0.0f64; 3];
    for (k, e) in epsilons.iter().enumerate() {
        log += (-e).ln_1p();
        let count = k + 1;
        if count == n / 4 {
            marks[0] = log;
        }
        if count == n / 2 {
            marks[1] = log;
        }
    }
    marks[2] = log;
    let partial = log.exp();
    if n < 8 {
        return Ok(LimitArea { value: partial, partial, error: 0.0 });
    }
    let [p0, p1, p2] = marks.map(f64::exp);
    let denom = p2 - 2.0 * p1 + p0;
    let value = if denom.abs() > 1e-300 && (p1 - p0).abs() > 0.0 {
        p2 - (p2 - p1) * (p2 - p1) / denom
    } else {
        partial
    };
    let value = value.clamp(0.0, partial);
    Ok(LimitArea { value, partial, error: (partial - value).abs() })
}

/// Exact area of every stage as a float, for reporting.
pub fn stage_areas(families: &[SquareFamily]) -> Vec<f64> {
    families.iter().map(|f| f.area().to_f64().unwrap_or(f64::NAN)).collect()
}
