//! Images transported through the discrete chain match the forward ODE for the same driver.

use num_complex::Complex64;

use loewner::dense::{build_dense_driver, visit_distances, DenseOptions};
use loewner::loewner::{evolve_point, Driver, Evolution};
use loewner::HalfPlanePoint;

#[test]
fn chain_images_match_the_forward_equation() {
    let points = [HalfPlanePoint::new(0.5, 1.0).unwrap(), HalfPlanePoint::new(-1.0, 0.7).unwrap()];
    let build = build_dense_driver(&points, &DenseOptions::new(1e-2)).unwrap();
    let horizon = build.driver.horizon();
    assert!((build.chain.total_capacity() - horizon).abs() < 1e-9 * horizon);
    assert!(visit_distances(&points, &build.trace.polyline()).iter().all(|&d| d <= 1e-2));

    for probe in [Complex64::new(3.0, 2.0), Complex64::new(-4.0, 1.5), Complex64::new(0.0, 4.0)] {
        let via_chain = build.chain.forward(probe);
        let z = HalfPlanePoint::try_from_complex(probe).unwrap();
        let Evolution::Alive(g) = evolve_point(&build.driver, z, 0.0, horizon, 1e-11).unwrap() else {
            panic!("{probe} captured");
        };
        let err = (g.to_complex() - via_chain).norm();
        assert!(err < 1e-6 * (1.0 + via_chain.norm()), "{probe}: chain {via_chain} vs ode {}", g.to_complex());
    }
}
