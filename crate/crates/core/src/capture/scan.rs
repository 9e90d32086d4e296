//! Capture-time scans over intervals of real starting points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::FlowState;
use crate::error::{invalid, Result};
use crate::geometry::HalfPlanePoint;
use crate::loewner::{evolve_point, Driver, Evolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRecord {
    pub x: f64,
    pub capture_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_trace: Option<Vec<FlowState>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaptureScan {
    /// Sorted by `x`.
    pub captured: Vec<CaptureRecord>,
    /// Points still alive at the horizon.
    pub survivors: Vec<f64>,
    /// Points whose evolution failed, with the error message.
    pub errors: Vec<(f64, String)>,
}

impl CaptureScan {
    /// Capture times strictly increasing or strictly decreasing in `x`.
    pub fn strictly_monotone(&self) -> bool {
        let t: Vec<f64> = self.captured.iter().map(|r| r.capture_time).collect();
        t.len() < 2 || t.windows(2).all(|w| w[1] > w[0]) || t.windows(2).all(|w| w[1] < w[0])
    }
}

/// Evolves `n` equally spaced points of `[x_lo, x_hi]` over the whole horizon.
///
/// Capture times are accurate to `tol`.
pub fn capture_scan(lambda: &impl Driver, x_lo: f64, x_hi: f64, n: usize, tol: f64) -> Result<CaptureScan> {
    if n == 0 || !(x_hi >= x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
        return Err(invalid(format!("need n >= 1 and x_lo <= x_hi, got [{x_lo}, {x_hi}] x {n}")));
    }
    let start = lambda.value(0.0);
    if (x_lo..=x_hi).contains(&start) {
        return Err(invalid(format!("scan interval contains the driver start {start}")));
    }
    let xs: Vec<f64> = (0..n)
        .map(|k| if n == 1 { x_lo } else { x_lo + (x_hi - x_lo) * k as f64 / (n - 1) as f64 })
        .collect();
    let outcomes: Vec<_> = xs
        .par_iter()
        .map(|&x| evolve_point(lambda, HalfPlanePoint::real(x), 0.0, lambda.horizon(), tol))
        .collect();
    let mut scan = CaptureScan::default();
    for (&x, outcome) in xs.iter().zip(outcomes) {
        match outcome {
            Ok(Evolution::Captured { time }) => {
                scan.captured.push(CaptureRecord { x, capture_time: time, flow_trace: None })
            }
            Ok(Evolution::Alive(_)) => scan.survivors.push(x),
            Err(e) => scan.errors.push((x, e.to_string())),
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::ClosedForm;

    #[test]
    fn bubble_five_captures_the_right_side_only() {
        let d = ClosedForm::Bubble { c: 5.0 };
        let hit = capture_scan(&d, 4.1, 4.9, 9, 1e-8).unwrap();
        assert_eq!(hit.captured.len(), 9, "{hit:?}");
        assert!(hit.captured.iter().all(|r| r.capture_time <= 1.0));
        let miss = capture_scan(&d, 0.1, 0.9, 9, 1e-8).unwrap();
        assert!(miss.captured.is_empty() && miss.errors.is_empty());
        assert_eq!(miss.survivors.len(), 9);
    }

    #[test]
    fn vertical_slit_captures_nothing() {
        let d = ClosedForm::Constant { c: 0.0, horizon: 2.0 };
        let scan = capture_scan(&d, 0.05, 3.0, 7, 1e-8).unwrap();
        assert!(scan.captured.is_empty());
        assert_eq!(scan.survivors.len(), 7);
    }

    #[test]
    fn scan_rejects_the_start_point() {
        let d = ClosedForm::Bubble { c: 5.0 };
        assert!(capture_scan(&d, 4.0, 6.0, 3, 1e-8).is_err());
        assert!(capture_scan(&d, 1.0, 2.0, 0, 1e-8).is_err());
    }
}
