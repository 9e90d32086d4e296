//! Elementary vertical-slit maps.
//!
//! `slit_forward(z, x, y) = x + sqrt((z - x)^2 + y^2)` maps the upper half-plane minus
//! the segment `[x, x + iy]` onto the upper half-plane; its half-plane capacity is
//! `y^2 / 4`. Square roots take the branch with nonnegative imaginary part, evaluated
//! as `u * sqrt(1 + (y/u)^2)` so that the principal branch cut falls exactly on the slit.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::HalfPlanePoint;

/// Side of an erased slit a point is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitSide {
    Left,
    Right,
}

impl SlitSide {
    fn sign(self) -> f64 {
        match self {
            SlitSide::Left => -1.0,
            SlitSide::Right => 1.0,
        }
    }
}

/// Unchecked forward map. Points on the closed slit go to the right side.
#[inline]
pub fn slit_forward(z: Complex64, x: f64, y: f64) -> Complex64 {
    let u = z - x;
    if u.im == 0.0 {
        let s = (u.re * u.re + y * y).sqrt();
        return Complex64::new(if u.re < 0.0 { x - s } else { x + s }, 0.0);
    }
    let q = Complex64::new(y, 0.0) / u;
    let w = u * (Complex64::new(1.0, 0.0) + q * q).sqrt();
    Complex64::new(x + w.re, w.im.max(0.0))
}

/// Unchecked inverse map.
#[inline]
pub fn slit_inverse(w: Complex64, x: f64, y: f64) -> Complex64 {
    let v = w - x;
    if v.im == 0.0 {
        let a = v.re;
        let d = a * a - y * y;
        return if d >= 0.0 {
            let s = d.sqrt();
            Complex64::new(if a < 0.0 { x - s } else { x + s }, 0.0)
        } else {
            Complex64::new(x, (-d).sqrt())
        };
    }
    let q = Complex64::new(y, 0.0) / v;
    let z = v * (Complex64::new(1.0, 0.0) - q * q).sqrt();
    Complex64::new(x + z.re, z.im.max(0.0))
}

/// Forward map with an explicit side for points on the closed slit.
#[inline]
pub fn slit_forward_sided(z: Complex64, x: f64, y: f64, side: SlitSide) -> Complex64 {
    let u = z - x;
    if u.re == 0.0 && u.im >= 0.0 && u.im <= y {
        let s = ((y - u.im) * (y + u.im)).sqrt();
        return Complex64::new(x + side.sign() * s, 0.0);
    }
    slit_forward(z, x, y)
}

fn check_height(y: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid(format!("slit height must be positive and finite, got {y}")));
    }
    Ok(())
}

/// Checked forward map; rejects points strictly inside the slit.
pub fn vertical_slit_map(z: HalfPlanePoint, x: f64, y: f64) -> Result<HalfPlanePoint> {
    check_height(y)?;
    if !x.is_finite() {
        return Err(invalid("slit base must be finite"));
    }
    if z.re == x && z.im > 0.0 && z.im < y {
        return Err(Error::InsideSlit { re: z.re, im: z.im, x, height: y });
    }
    HalfPlanePoint::try_from_complex(slit_forward(z.to_complex(), x, y))
}

/// Checked inverse map. Real points within `y` of `x` land on the slit.
pub fn inverse_vertical_slit_map(w: HalfPlanePoint, x: f64, y: f64) -> Result<HalfPlanePoint> {
    check_height(y)?;
    if !x.is_finite() {
        return Err(invalid("slit base must be finite"));
    }
    HalfPlanePoint::try_from_complex(slit_inverse(w.to_complex(), x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(re, im).unwrap()
    }

    #[test]
    fn base_point_and_tip() {
        assert_eq!(vertical_slit_map(p(0.0, 0.0), 0.0, 2.0).unwrap(), p(2.0, 0.0));
        let tip = vertical_slit_map(p(0.0, 2.0), 0.0, 2.0).unwrap();
        assert!(tip.re.abs() < 1e-15 && tip.im.abs() < 1e-15);
    }

    #[test]
    fn interior_point_matches_direct_square_root() {
        // sqrt(i^2 + 4) = sqrt(3)
        let w = vertical_slit_map(p(0.0, 1.5), 0.0, 2.0);
        assert!(matches!(w, Err(Error::InsideSlit { .. })));
        let w = vertical_slit_map(p(0.0, 3.0), 0.0, 2.0).unwrap();
        assert!((w.im - 5f64.sqrt()).abs() < 1e-15 && w.re == 0.0);
        let w = vertical_slit_map(p(1e-300, 1.0), 0.0, 2.0).unwrap();
        assert!((w.re - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sqrt3_example_and_inverse() {
        // i sits on the slit of height 2 at 0: the checked map refuses, the side-tagged map
        // sends it to +-sqrt(3).
        let right = slit_forward_sided(Complex64::new(0.0, 1.0), 0.0, 2.0, SlitSide::Right);
        let left = slit_forward_sided(Complex64::new(0.0, 1.0), 0.0, 2.0, SlitSide::Left);
        assert!((right.re - 3f64.sqrt()).abs() < 1e-15);
        assert!((left.re + 3f64.sqrt()).abs() < 1e-15);
        let back = inverse_vertical_slit_map(p(3f64.sqrt(), 0.0), 0.0, 2.0).unwrap();
        assert!(back.re.abs() < 1e-12 && (back.im - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let w = inverse_vertical_slit_map(p(2.0, 0.0), 0.0, 2.0).unwrap();
        assert_eq!(w, p(0.0, 0.0));
        let w = inverse_vertical_slit_map(p(0.0, 0.0), 0.0, 2.0).unwrap();
        assert_eq!(w, p(0.0, 2.0));
        let w = inverse_vertical_slit_map(p(-5.0, 0.0), 1.0, 8.0).unwrap();
        assert!((w.re - 1.0).abs() < 1e-15 && (w.im - 28f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_heights() {
        assert!(vertical_slit_map(p(1.0, 1.0), 0.0, 0.0).is_err());
        assert!(vertical_slit_map(p(1.0, 1.0), 0.0, -1.0).is_err());
        assert!(inverse_vertical_slit_map(p(1.0, 1.0), 0.0, f64::NAN).is_err());
    }

    #[test]
    fn real_points_move_away_from_base() {
        let a = slit_forward(Complex64::new(-3.0, 0.0), 0.0, 4.0);
        let b = slit_forward(Complex64::new(3.0, 0.0), 0.0, 4.0);
        assert_eq!(a.re, -5.0);
        assert_eq!(b.re, 5.0);
    }

    #[test]
    fn capacity_from_expansion_at_infinity() {
        // g(z) = z + 2 hcap / z + O(z^-2)
        let (x, y) = (0.3, 1.7);
        let z = Complex64::new(1e3, 3e3);
        let w = slit_forward(z, x, y);
        let coeff = ((w - z) * (z - x)).re;
        assert!((coeff / 2.0 - y * y / 4.0).abs() < 1e-6);
    }

    #[test]
    fn branch_sanity_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-5.0..5.0);
            let y: f64 = rng.gen_range(0.01..5.0);
            let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(0.0..10.0));
            let back = slit_inverse(slit_forward(z, x, y), x, y);
            let scale = (z - x).norm() + y;
            worst = worst.max((back - z).norm() / scale);
        }
        assert!(worst < 1e-10, "worst relative round-trip error {worst:e}");
    }

    proptest! {
        #[test]
        fn forward_lands_in_closed_upper_half_plane(
            re in -20.0f64..20.0, im in 0.0f64..20.0, x in -5.0f64..5.0, y in 1e-3f64..5.0
        ) {
            let w = slit_forward(Complex64::new(re, im), x, y);
            prop_assert!(w.im >= 0.0 && w.re.is_finite());
            let v = slit_inverse(Complex64::new(re, im), x, y);
            prop_assert!(v.im >= 0.0 && v.re.is_finite());
        }

        #[test]
        fn inverse_then_forward_round_trips(
            re in -20.0f64..20.0, im in 0.0f64..20.0, x in -5.0f64..5.0, y in 1e-2f64..5.0
        ) {
            let w = Complex64::new(re, im);
            let z = slit_inverse(w, x, y);
            // Real targets inside the slit shadow come back on the right side by default.
            let side = if re < x { SlitSide::Left } else { SlitSide::Right };
            let back = slit_forward_sided(z, x, y, side);
            prop_assert!((back - w).norm() <= 1e-9 * ((w - x).norm() + y));
        }
    }
}
