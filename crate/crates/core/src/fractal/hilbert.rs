use num_complex::Complex64;

use super::{check_level, FractalKind};
use crate::error::{invalid, Result};
use crate::geometry::Polyline;

/// Cell `(x, y)` of index `d` along the Hilbert curve on a `side × side` grid
/// (`side` a power of two). Starts at `(0, 0)` and ends at `(side - 1, 0)`.
pub fn hilbert_d2xy(side: u64, d: u64) -> (u64, u64) {
    let (mut x, mut y) = (0u64, 0u64);
    let mut t = d;
    let mut s = 1u64;
    while s < side {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

/// Grid cells in Hilbert order at `level`.
pub fn hilbert_centers(level: u32) -> Vec<(u64, u64)> {
    let side = 1u64 << level;
    (0..side * side).map(|d| hilbert_d2xy(side, d)).collect()
}

/// Level-`n` Hilbert polyline through the `4ⁿ` subsquare centres of the unit square,
/// preceded by a vertical stem from the real line to the first centre.
pub fn hilbert(level: u32) -> Result<Polyline> {
    if level == 0 {
        return Err(invalid("hilbert curve needs level >= 1"));
    }
    check_level(FractalKind::Hilbert, level)?;
    let h = 1.0 / (1u64 << level) as f64;
    let centre = |(i, j): (u64, u64)| Complex64::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
    let cells = hilbert_centers(level);
    let mut pts = Vec::with_capacity(cells.len() + 1);
    pts.push(Complex64::new(centre(cells[0]).re, 0.0));
    pts.extend(cells.into_iter().map(centre));
    Ok(Polyline::new(pts))
}
