//! Arrowhead curves.
//!
//! The half-gasket curve is the first half of the arrowhead approximant: its segments up
//! to the midpoint of the middle segment. The arrowhead is symmetric under `z ↦ 1 - z̄`
//! with reversed direction, so this half covers the gasket part with `Re z ≤ 1/2` and
//! the limit is the left half of the gasket. Level 0 is the left half `[0, 1/2]` of the
//! base. For `n ≥ 1` the curve ends at the midpoint of the middle segment on `Re z = 1/2`.

use num_complex::Complex64;

use super::{check_level, FractalKind};
use crate::error::Result;
use crate::geometry::Polyline;

fn arrowhead_points(level: u32) -> Vec<Complex64> {
    fn rec(a: Complex64, b: Complex64, level: u32, turn: f64, out: &mut Vec<Complex64>) {
        if level == 0 {
            out.push(b);
            return;
        }
        let half = (b - a) * 0.5;
        let p1 = a + half * Complex64::from_polar(1.0, turn * std::f64::consts::FRAC_PI_3);
        let p2 = p1 + half;
        rec(a, p1, level - 1, -turn, out);
        rec(p1, p2, level - 1, turn, out);
        rec(p2, b, level - 1, -turn, out);
    }
    let (a, b) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut out = Vec::with_capacity(3usize.pow(level) + 1);
    out.push(a);
    rec(a, b, level, 1.0, &mut out);
    // Points on the base pick up rounding noise from the rotations.
    for z in &mut out {
        if z.im.abs() < 1e-12 {
            z.im = 0.0;
        }
    }
    out
}

/// Level-`n` arrowhead approximant of the Sierpinski gasket on `[0, 1]`, `3ⁿ` segments.
pub fn sierpinski_arrowhead(level: u32) -> Result<Polyline> {
    check_level(FractalKind::Arrowhead, level)?;
    Ok(Polyline::new(arrowhead_points(level)))
}

/// Level-`n` half-gasket curve.
pub fn half_sierpinski(level: u32) -> Result<Polyline> {
    check_level(FractalKind::HalfSierpinski, level)?;
    let pts = arrowhead_points(level);
    let segs = pts.len() - 1;
    let mid = segs / 2;
    let mut out = pts[..=mid].to_vec();
    out.push((pts[mid] + pts[mid + 1]) * 0.5);
    Ok(Polyline::new(out))
}

/// [`half_sierpinski`] rotated by 60° about the origin so that it meets the real line only
/// at its start, as zipping requires.
pub fn half_sierpinski_standing(level: u32) -> Result<Polyline> {
    let rot = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    Ok(half_sierpinski(level)?.map(|z| z * rot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyline_hausdorff;

    #[test]
    fn arrowhead_first_levels() {
        assert_eq!(sierpinski_arrowhead(0).unwrap(), Polyline::from_pairs(&[(0.0, 0.0), (1.0, 0.0)]));
        let s = 3f64.sqrt() / 4.0;
        let a1 = sierpinski_arrowhead(1).unwrap();
        let expect = [(0.0, 0.0), (0.25, s), (0.75, s), (1.0, 0.0)];
        for (z, (x, y)) in a1.vertices.iter().zip(expect) {
            assert!((z.re - x).abs() < 1e-15 && (z.im - y).abs() < 1e-15, "{z}");
        }
        assert_eq!(sierpinski_arrowhead(4).unwrap().len(), 82);
    }

    #[test]
    fn half_curve_levels() {
        assert_eq!(half_sierpinski(0).unwrap(), Polyline::from_pairs(&[(0.0, 0.0), (0.5, 0.0)]));
        for n in 1..=7 {
            let c = half_sierpinski(n).unwrap();
            assert!((c.vertices.last().unwrap().re - 0.5).abs() < 1e-12);
            assert!(c.vertices.iter().all(|z| z.re <= 0.5 + 1e-12));
        }
        let st = half_sierpinski_standing(5).unwrap();
        assert_eq!(st.vertices.iter().filter(|z| z.im.abs() < 1e-12).count(), 1);
    }

    #[test]
    fn half_curve_levels_converge() {
        let mut prev = half_sierpinski(0).unwrap();
        for n in 1..=7 {
            let cur = half_sierpinski(n).unwrap();
            let d = polyline_hausdorff(&prev, &cur, 1e-3);
            assert!(d <= 2f64.powi(-(n as i32)), "level {n}: {d}");
            prev = cur;
        }
    }
}
