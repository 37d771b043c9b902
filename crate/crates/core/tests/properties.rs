use std::f64::consts::PI;

use proptest::prelude::*;
use robin_corner::cone_energy::domain_energy;
use robin_corner::fem::{FemSystem, SolverConfig};
use robin_corner::geometry::{DomainSpec, Point, Polygon};
use robin_corner::mesher::{refine_uniform, triangulate};

fn star(radii: &[f64]) -> Polygon {
    let n = radii.len();
    Polygon::new(
        radii
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect(),
    )
}

fn tight() -> SolverConfig {
    SolverConfig { tol: 1e-12, ..SolverConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_rigid_motion_invariant(phi in 0.0..(2.0 * PI), dx in -5.0..5.0f64, dy in -5.0..5.0f64, which in 0usize..3) {
        let p = [Polygon::unit_square(), Polygon::l_shape(), Polygon::regular(5, 1.0)][which].clone();
        let (c, s) = (phi.cos(), phi.sin());
        let q = p.transformed(|v| Point::new(c * v.x - s * v.y + dx, s * v.x + c * v.y + dy));
        let e0 = domain_energy(&DomainSpec::Polygon(p)).unwrap().energy.value();
        let e1 = domain_energy(&DomainSpec::Polygon(q)).unwrap().energy.value();
        prop_assert!((e0 - e1).abs() <= 1e-9 * e0.abs());
    }

    #[test]
    fn interior_angles_sum(radii in prop::collection::vec(0.5..1.5f64, 3..12)) {
        let p = star(&radii);
        prop_assume!(p.validate().is_valid());
        let sum: f64 = p.interior_angles().iter().sum();
        prop_assert!((sum - (radii.len() as f64 - 2.0) * PI).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn discrete_scaling_law(t in 0.3..3.0f64, alpha in 0.5..8.0f64) {
        let m = refine_uniform(&triangulate(&Polygon::l_shape()).unwrap(), 2).unwrap();
        let base = FemSystem::robin(&m).unwrap().solve(t * alpha, &tight()).unwrap().lambda;
        let scaled = FemSystem::robin(&m.scaled(t)).unwrap().solve(alpha, &tight()).unwrap().lambda;
        prop_assert!((scaled - base / (t * t)).abs() <= 1e-10 * scaled.abs(), "{scaled} vs {}", base / (t * t));
    }

    #[test]
    fn monotone_in_alpha(a in 0.0..10.0f64, da in 0.01..5.0f64) {
        let m = refine_uniform(&triangulate(&Polygon::unit_square()).unwrap(), 2).unwrap();
        let sys = FemSystem::robin(&m).unwrap();
        let l0 = sys.solve(a, &tight()).unwrap().lambda;
        let l1 = sys.solve(a + da, &tight()).unwrap().lambda;
        prop_assert!(l1 <= l0 + 1e-10 * l0.abs().max(1.0));
    }
}
