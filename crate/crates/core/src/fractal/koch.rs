use num_complex::Complex64;

use super::{check_level, FractalKind};
use crate::error::Result;
use crate::geometry::Polyline;

/// Level-`n` van Koch polyline over `[0, 1]`, bumps pointing up; `4ⁿ + 1` vertices.
pub fn koch(level: u32) -> Result<Polyline> {
    check_level(FractalKind::Koch, level)?;
    let bump = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let mut pts = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    for _ in 0..level {
        let mut next = Vec::with_capacity(4 * pts.len());
        next.push(pts[0]);
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = (b - a) / 3.0;
            next.extend([a + d, a + d + d * bump, a + d * 2.0, b]);
        }
        pts = next;
    }
    Ok(Polyline::new(pts))
}

/// [`koch`] turned a quarter turn counter-clockwise: runs from `0` to `i` and meets the
/// real line only at its start, so it can be zipped.
pub fn koch_standing(level: u32) -> Result<Polyline> {
    Ok(koch(level)?.map(|z| z * Complex64::i()))
}
