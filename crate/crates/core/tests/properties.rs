use std::f64::consts::PI;

use proptest::prelude::*;

use covpack::config::random_points;
use covpack::dynamics::{circle_forces, ExpansionSystemState};
use covpack::geometry::{
    convex_hull, halfplane_cut_area, lens_area, overflow_area, signed_distance, EstimatorParams,
    SampleSet,
};
use covpack::init::{initialize, InitParams};
use covpack::metrics::{min_gap, Metrics};
use covpack::{CircleConfiguration, ConvexPolygon, Point2};

fn polygon(seed: u64, count: usize) -> Option<ConvexPolygon> {
    convex_hull(&random_points(count, seed, 10.0)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lens_is_two_cuts(d in 0.0..2.0f64, r in 0.01..100.0f64) {
        let d = d * r;
        let a = lens_area(d, r).unwrap();
        let b = 2.0 * halfplane_cut_area(0.5 * d, r).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn overflow_is_complementary(d in -1.0..1.0f64, r in 0.1..10.0f64) {
        let d = d * r;
        let total = overflow_area(d, r) + overflow_area(-d, r);
        prop_assert!((total - PI * r * r).abs() <= 1e-12 * PI * r * r);
    }

    #[test]
    fn rigid_motion_preserves_signed_distance(
        seed in any::<u64>(), count in 3usize..30, angle in 0.0..6.3f64,
        tx in -50.0..50.0f64, ty in -50.0..50.0f64, px in -8.0..8.0f64, py in -8.0..8.0f64,
    ) {
        let Some(poly) = polygon(seed, count) else { return Ok(()) };
        let offset = Point2::new(tx, ty);
        let moved = poly.transformed(angle, Point2::ORIGIN, offset);
        prop_assert!((moved.area() - poly.area()).abs() <= 1e-9 * poly.area());
        prop_assert!((moved.perimeter() - poly.perimeter()).abs() <= 1e-9 * poly.perimeter());
        let p = Point2::new(px, py);
        let q = p.rotated(angle) + offset;
        let (a, b) = (signed_distance(p, &poly), signed_distance(q, &moved));
        prop_assert!((a - b).abs() <= 1e-9 * poly.diameter());
    }

    #[test]
    fn pair_forces_cancel(seed in any::<u64>(), n in 2usize..25, r in 0.2..2.0f64) {
        let pts = random_points(n, seed, 6.0);
        let mut sum = Point2::ORIGIN;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            let Ok(f) = circle_forces(&pts, r, i) else { return Ok(()) };
            sum += f;
            scale = scale.max(f.norm());
        }
        prop_assert!(sum.norm() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn initialization_is_feasible_and_exact(seed in any::<u64>(), count in 3usize..20, n in 1usize..60) {
        let Some(poly) = polygon(seed, count) else { return Ok(()) };
        let r = (0.5 * poly.area() / (n as f64 * PI)).sqrt();
        let out = initialize(&poly, &InitParams::new(n, r)).unwrap();
        prop_assert_eq!(out.config.len(), n);
        for &c in &out.config.centers {
            prop_assert!(signed_distance(c, &poly) >= -poly.tolerance());
        }
        let again = initialize(&poly, &InitParams::new(n, r)).unwrap();
        prop_assert_eq!(out, again);
    }

    #[test]
    fn metrics_invariant_under_rigid_motion(seed in any::<u64>(), angle in 0.0..6.3f64, tx in -20.0..20.0f64) {
        let Some(poly) = polygon(seed, 12) else { return Ok(()) };
        let n = 9;
        let r = (0.5 * poly.area() / (n as f64 * PI)).sqrt();
        let cfg = initialize(&poly, &InitParams::new(n, r)).unwrap().config;
        let set = SampleSet::new(&poly, &EstimatorParams::monte_carlo(5_000, seed)).unwrap();
        let pivot = Point2::ORIGIN;
        let offset = Point2::new(tx, -tx);
        let poly2 = poly.transformed(angle, pivot, offset);
        let cfg2 = CircleConfiguration::new(
            cfg.centers.iter().map(|&c| (c - pivot).rotated(angle) + pivot + offset).collect(),
            r,
        ).unwrap();
        let set2 = set.transformed(angle, pivot, offset);
        let (m1, m2) = (Metrics::compute(&poly, &cfg, &set), Metrics::compute(&poly2, &cfg2, &set2));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        prop_assert!(close(m1.coverage_rate, m2.coverage_rate));
        prop_assert!(close(m1.usage_rate, m2.usage_rate));
        prop_assert!(close(m1.boundary_adaptability, m2.boundary_adaptability));
        prop_assert!(close(m1.uniformity_index, m2.uniformity_index));
        prop_assert!(close(m1.min_gap.unwrap(), m2.min_gap.unwrap()));
        prop_assert!(close(m1.distribution_quality.unwrap(), m2.distribution_quality.unwrap()));
    }

    #[test]
    fn min_gap_is_brute_force(seed in any::<u64>(), n in 2usize..30, r in 0.1..1.0f64) {
        let pts = random_points(n, seed, 10.0);
        let cfg = CircleConfiguration::new(pts.clone(), r).unwrap();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(pts[i].distance(pts[j]) - 2.0 * r);
            }
        }
        prop_assert_eq!(min_gap(&cfg).unwrap(), best);
    }

    #[test]
    fn friction_dissipates(seed in any::<u64>(), n in 1usize..6) {
        use covpack::dynamics::{integrate_step, DynamicsParams};
        // widely separated circles: no overlaps, so only damping acts
        let big = polygon(seed, 3).unwrap_or_else(|| polygon(1, 8).unwrap());
        let centers: Vec<Point2> = (0..n).map(|i| big.centroid() + Point2::new(0.001 * i as f64, 0.0)).collect();
        let cfg = CircleConfiguration::new(centers, 1e-6).unwrap();
        let mut s = ExpansionSystemState::at_rest(&cfg);
        for (i, v) in s.velocities.iter_mut().enumerate() {
            *v = Point2::new(1e-3 * (i as f64 + 1.0), -2e-3);
        }
        let p = DynamicsParams::for_radius(1.0);
        let mut e = s.kinetic_energy();
        for _ in 0..20 {
            s = integrate_step(&s, &big, &p).unwrap();
            let e2 = s.kinetic_energy();
            prop_assert!(e2 < e);
            e = e2;
        }
    }
}
