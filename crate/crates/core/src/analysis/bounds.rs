//! Growth bounds for hulls: height at most `2√T`, driver displacement at most `4 diam`.

use serde::{Deserialize, Serialize};

use crate::geometry::diameter;
use crate::loewner::{Driver, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    /// `max Im γ / (2√T)`.
    pub height_ratio: f64,
    /// `|λ(T) - λ(0)| / (4 diam γ)`; zero for a degenerate trace.
    pub displacement_ratio: f64,
    pub holds: bool,
}

/// Checks both bounds for `trace`, computed from `lambda`, with relative slack `tol`.
pub fn check_capacity_bounds(lambda: &impl Driver, trace: &Trace, tol: f64) -> CapacityReport {
    let horizon = trace.horizon();
    let height_ratio = trace.max_im() / (2.0 * horizon.sqrt());
    let points: Vec<_> = trace.vertices.iter().map(|v| v.to_complex()).collect();
    let diam = diameter(&points);
    let moved = (lambda.value(horizon) - lambda.value(0.0)).abs();
    let displacement_ratio = if diam > 0.0 { moved / (4.0 * diam) } else { 0.0 };
    CapacityReport {
        height_ratio,
        displacement_ratio,
        holds: height_ratio <= 1.0 + tol && displacement_ratio <= 1.0 + tol,
    }
}
