//! Points of the closed upper half-plane and polylines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A point of the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(invalid(format!("non-finite point ({re}, {im})")));
        }
        if im < 0.0 {
            return Err(invalid(format!("point ({re}, {im}) lies below the real axis")));
        }
        Ok(Self { re, im })
    }

    pub fn real(x: f64) -> Self {
        Self { re: x, im: 0.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn try_from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn is_real(self) -> bool {
        self.im == 0.0
    }
}

impl From<HalfPlanePoint> for Complex64 {
    fn from(p: HalfPlanePoint) -> Self {
        p.to_complex()
    }
}

/// An ordered polyline in the plane.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyline {
    pub vertices: Vec<Complex64>,
}

impl Polyline {
    pub fn new(vertices: Vec<Complex64>) -> Self {
        Self { vertices }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(x, y)| Complex64::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn max_edge(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).fold(0.0, f64::max)
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn min_im(&self) -> f64 {
        self.vertices.iter().map(|z| z.im).fold(f64::INFINITY, f64::min)
    }

    pub fn max_im(&self) -> f64 {
        self.vertices.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.vertices)
    }

    /// Applies `f` to every vertex.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(self.vertices.iter().map(|&z| f(z)).collect())
    }

    pub fn scaled(&self, r: f64) -> Self {
        self.map(|z| z * r)
    }

    /// Rotates about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Self {
        let w = Complex64::from_polar(1.0, angle);
        self.map(|z| z * w)
    }

    /// Distance from `p` to the nearest point of the polyline.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (self.vertices[0] - p).norm(),
            _ => self
                .segments()
                .map(|(a, b)| point_segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// True when no two non-adjacent segments meet and no adjacent pair folds back.
    pub fn is_simple(&self) -> bool {
        first_self_intersection(&self.vertices).is_none()
    }
}

pub fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * d.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Diameter of a point set.
pub fn diameter(points: &[Complex64]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    // Quadratic in the hull size only.
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Monotone-chain convex hull.
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Complex64> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn segments_meet(a: Complex64, b: Complex64, c: Complex64, d: Complex64, eps: f64) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    let straddle = |u: f64, v: f64| (u > eps && v < -eps) || (u < -eps && v > eps);
    if straddle(d1, d2) && straddle(d3, d4) {
        return true;
    }
    // Touching or collinear contact.
    let near = |p: Complex64, s: Complex64, t: Complex64| point_segment_distance(p, s, t) <= eps.sqrt();
    near(a, c, d) || near(b, c, d) || near(c, a, b) || near(d, a, b)
}

/// Index pair of the first offending segment pair, if any. Uses a uniform grid so
/// that only segments sharing a cell are compared.
pub fn first_self_intersection(vertices: &[Complex64]) -> Option<(usize, usize)> {
    let n = vertices.len();
    if n < 3 {
        return None;
    }
    let nseg = n - 1;
    let scale = diameter(vertices).max(f64::MIN_POSITIVE);
    let eps = (scale * 1e-10).powi(2);

    // Adjacent segments must not fold back onto each other.
    for i in 0..nseg - 1 {
        let (a, b, c) = (vertices[i], vertices[i + 1], vertices[i + 2]);
        let u = b - a;
        let v = c - b;
        if cross(a, b, c).abs() <= eps && (u * v.conj()).re < 0.0 {
            return Some((i, i + 1));
        }
    }

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in vertices {
        xmin = xmin.min(z.re);
        xmax = xmax.max(z.re);
        ymin = ymin.min(z.im);
        ymax = ymax.max(z.im);
    }
    let mean_edge = vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>() / nseg as f64;
    let cell = (2.0 * mean_edge).max(scale / 4096.0).max(f64::MIN_POSITIVE);
    let nx = (((xmax - xmin) / cell).floor() as usize + 1).min(1 << 12);
    let ny = (((ymax - ymin) / cell).floor() as usize + 1).min(1 << 12);
    let cw = (xmax - xmin) / nx as f64 + f64::MIN_POSITIVE;
    let ch = (ymax - ymin) / ny as f64 + f64::MIN_POSITIVE;
    let cell_of = |x: f64, y: f64| {
        let i = (((x - xmin) / cw) as usize).min(nx - 1);
        let j = (((y - ymin) / ch) as usize).min(ny - 1);
        (i, j)
    };
    let pad = scale * 1e-9;
    let mut grid: std::collections::HashMap<(usize, usize), Vec<usize>> = std::collections::HashMap::new();
    for s in 0..nseg {
        let (a, b) = (vertices[s], vertices[s + 1]);
        let (i0, j0) = cell_of(a.re.min(b.re) - pad, a.im.min(b.im) - pad);
        let (i1, j1) = cell_of(a.re.max(b.re) + pad, a.im.max(b.im) + pad);
        for i in i0..=i1 {
            for j in j0..=j1 {
                grid.entry((i, j)).or_default().push(s);
            }
        }
    }
    let mut found: Option<(usize, usize)> = None;
    for bucket in grid.values() {
        for (k, &s) in bucket.iter().enumerate() {
            for &t in &bucket[k + 1..] {
                let (s, t) = if s < t { (s, t) } else { (t, s) };
                if t == s + 1 {
                    continue;
                }
                if segments_meet(vertices[s], vertices[s + 1], vertices[t], vertices[t + 1], eps) {
                    found = match found {
                        Some(f) if f <= (s, t) => Some(f),
                        _ => Some((s, t)),
                    };
                }
            }
        }
    }
    found
}

/// Nearest-neighbour queries over a fixed point cloud.
pub struct PointIndex {
    points: Vec<Complex64>,
    xmin: f64,
    ymin: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl PointIndex {
    pub fn new(points: Vec<Complex64>) -> Self {
        assert!(!points.is_empty(), "PointIndex needs at least one point");
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in &points {
            xmin = xmin.min(z.re);
            xmax = xmax.max(z.re);
            ymin = ymin.min(z.im);
            ymax = ymax.max(z.im);
        }
        let extent = (xmax - xmin).max(ymax - ymin).max(1e-12);
        let side = (points.len() as f64).sqrt().ceil().max(1.0);
        let cell = extent / side;
        let nx = ((xmax - xmin) / cell) as usize + 1;
        let ny = ((ymax - ymin) / cell) as usize + 1;
        let mut cells = vec![Vec::new(); nx * ny];
        for (k, z) in points.iter().enumerate() {
            let i = (((z.re - xmin) / cell) as usize).min(nx - 1);
            let j = (((z.im - ymin) / cell) as usize).min(ny - 1);
            cells[j * nx + i].push(k as u32);
        }
        Self { points, xmin, ymin, cell, nx, ny, cells }
    }

    pub fn nearest_distance(&self, p: Complex64) -> f64 {
        let ci = ((p.re - self.xmin) / self.cell).floor() as i64;
        let cj = ((p.im - self.ymin) / self.cell).floor() as i64;
        let mut best = f64::INFINITY;
        let max_ring = ci.abs().max(cj.abs()) + (self.nx + self.ny) as i64 + 1;
        for ring in 0..=max_ring {
            // Every point outside the rings already searched is at least this far.
            let lower = (ring as f64 - 1.0).max(0.0) * self.cell;
            if best < lower {
                break;
            }
            for i in (ci - ring)..=(ci + ring) {
                for j in (cj - ring)..=(cj + ring) {
                    if (i - ci).abs() != ring && (j - cj).abs() != ring {
                        continue;
                    }
                    if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
                        continue;
                    }
                    for &k in &self.cells[j as usize * self.nx + i as usize] {
                        best = best.min((self.points[k as usize] - p).norm());
                    }
                }
            }
        }
        best
    }
}

/// Densifies a polyline so consecutive samples are at most `spacing` apart.
pub fn sample_polyline(vertices: &[Complex64], spacing: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(vertices.len());
    if let Some(&first) = vertices.first() {
        out.push(first);
    }
    for w in vertices.windows(2) {
        let n = ((w[1] - w[0]).norm() / spacing).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(w[0] + (w[1] - w[0]) * (k as f64 / n as f64));
        }
    }
    out
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    use rayon::prelude::*;
    let ia = PointIndex::new(a.to_vec());
    let ib = PointIndex::new(b.to_vec());
    let ab = a.par_iter().map(|&p| ib.nearest_distance(p)).reduce(|| 0.0, f64::max);
    let ba = b.par_iter().map(|&p| ia.nearest_distance(p)).reduce(|| 0.0, f64::max);
    ab.max(ba)
}

/// Hausdorff distance between two polylines, both sampled at `spacing`.
pub fn polyline_hausdorff(a: &Polyline, b: &Polyline, spacing: f64) -> f64 {
    hausdorff(&sample_polyline(&a.vertices, spacing), &sample_polyline(&b.vertices, spacing))
}
