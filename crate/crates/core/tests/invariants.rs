//! Equivariance and consistency properties of the forward and inverse solvers.

use num_complex::Complex64;
use proptest::prelude::*;

use loewner::capture::{flow_x, sigma_of, FlowOptions};
use loewner::loewner::{
    evolve_point, solve_trace, transform_driving, ClosedForm, Driver, DrivingFunction, Evolution, StepPolicy,
};
use loewner::welding::extract_driving;
use loewner::HalfPlanePoint;

fn wiggle(a: f64, b: f64, w: f64) -> DrivingFunction {
    DrivingFunction::from_fn(|t| a * t.sqrt() + b * (w * t).sin(), 1.0, 400).unwrap()
}

fn tip(lambda: &DrivingFunction) -> Complex64 {
    solve_trace(lambda, &StepPolicy::uniform(400)).unwrap().last().to_complex()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Scaling by r and shifting by x moves the tip to r·tip + x.
    #[test]
    fn trace_is_affine_equivariant(a in -2.0f64..2.0, b in -1.0f64..1.0, w in 0.5f64..6.0,
                                   r in 0.3f64..3.0, x in -3.0f64..3.0) {
        let lambda = wiggle(a, b, w);
        let moved = transform_driving(&lambda, r, x, false).unwrap();
        let expected = tip(&lambda) * r + x;
        prop_assert!((tip(&moved) - expected).norm() < 1e-8 * (1.0 + expected.norm()));
    }

    // Negating the driver reflects the trace in the imaginary axis.
    #[test]
    fn trace_is_reflection_equivariant(a in -2.0f64..2.0, b in -1.0f64..1.0, w in 0.5f64..6.0) {
        let lambda = wiggle(a, b, w);
        let flipped = transform_driving(&lambda, 1.0, 0.0, true).unwrap();
        let z = tip(&lambda);
        prop_assert!((tip(&flipped) + z.conj()).norm() < 1e-10 * (1.0 + z.norm()));
    }

    // Extraction commutes with the same affine maps applied to the curve.
    #[test]
    fn extraction_is_affine_equivariant(a in -2.0f64..2.0, b in -0.5f64..0.5, r in 0.5f64..2.0, x in -2.0f64..2.0) {
        let lambda = wiggle(a, b, 3.0);
        let curve = solve_trace(&lambda, &StepPolicy::uniform(200)).unwrap().polyline();
        let base = extract_driving(&curve, 1.0).unwrap();
        let moved = extract_driving(&curve.map(|z| z * r + x), 1.0).unwrap();
        prop_assert!((moved.horizon() - r * r * base.horizon()).abs() < 1e-9 * r * r * base.horizon());
        for (t, v) in moved.times().iter().zip(moved.values()) {
            let expected = r * base.value(t / (r * r)) + x;
            prop_assert!((v - expected).abs() < 1e-8 * (1.0 + expected.abs()));
        }
    }
}

/// The time-changed flow and the forward equation agree on `x_s = g_t(x) / √(1 - t)`.
#[test]
fn time_change_matches_forward_evolution() {
    for c in [3.0, 5.0, 6.5] {
        let bubble = ClosedForm::Bubble { c };
        for x0 in [-1.5, -0.4, 0.3, 0.9] {
            for s in [0.5, 1.0, 2.0] {
                let t = -(-s as f64).exp_m1();
                let Evolution::Alive(g) = evolve_point(&bubble, HalfPlanePoint::real(x0), 0.0, t, 1e-12).unwrap() else {
                    panic!("{x0} captured before {t} under c = {c}");
                };
                let via_ode = g.re / (1.0 - t).sqrt();
                let path = flow_x(|s| sigma_of(&bubble, s), x0, s, &FlowOptions::default()).unwrap();
                let via_flow = path.last().x;
                assert!(
                    (via_ode - via_flow).abs() < 1e-6 * (1.0 + via_ode.abs()),
                    "c = {c}, x0 = {x0}, s = {s}: {via_ode} vs {via_flow}"
                );
            }
        }
    }
}
