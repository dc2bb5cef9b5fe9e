use std::f64::consts::PI;

use covpack::boundary::{encircle, generate_encircling_points, penalty_objective, LagrangianParams};
use covpack::config::{generate_polygon, PolygonSpec};
use covpack::dynamics::{
    expand_radii, integrate_step, usage_rate, DynamicsParams, ExpansionSystemState,
};
use covpack::geometry::{
    lens_area, minimum_bounding_rectangle, signed_distance, EstimatorParams, SampleSet,
};
use covpack::init::{
    filter_and_insert, fit_lattice, generate_hex_lattice, initialize, principal_direction, InitParams,
};
use covpack::{CircleConfiguration, ConvexPolygon, Point2, Vec2};

fn square(side: f64) -> ConvexPolygon {
    ConvexPolygon::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(side, 0.0),
        Point2::new(side, side),
        Point2::new(0.0, side),
    ])
    .unwrap()
}

fn heptagon() -> ConvexPolygon {
    let pts = [(0.5, 3.0), (2.0, 1.0), (5.0, 2.0), (8.0, 4.0), (7.0, 7.0), (4.0, 8.0), (1.0, 5.0)];
    ConvexPolygon::new(pts.iter().map(|&p| Point2::from(p)).collect()).unwrap()
}

fn pair_distances(pts: &[Point2]) -> Vec<f64> {
    let mut d = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d.push(a.distance(*b));
        }
    }
    d
}

// ------------------------------------------------------------------ init

#[test]
fn nineteen_point_lattice_has_42_unit_pairs() {
    let lat = generate_hex_lattice(19, 1.0).unwrap();
    let d = pair_distances(&lat.points);
    assert!(d.iter().all(|&x| x >= 2.0 - 1e-12));
    assert_eq!(d.iter().filter(|&&x| (x - 2.0).abs() < 1e-9).count(), 42);
}

#[test]
fn fitting_is_a_similarity() {
    let lat = generate_hex_lattice(37, 1.0).unwrap();
    let params = InitParams::new(37, 1.0);
    let (cfg, beta) = fit_lattice(&lat, &square(60.0), &params).unwrap();
    let before = pair_distances(&lat.points);
    let after = pair_distances(&cfg.centers);
    for (a, b) in before.iter().zip(&after) {
        assert!((b / a - beta).abs() <= 1e-9 * beta);
    }
    assert!(after.iter().all(|&x| x >= 2.0 * beta - 1e-9));
}

#[test]
fn heptagon_orientation_matches_sweep() {
    let poly = heptagon();
    let (dir, theta) = principal_direction(&poly);
    let mbr = minimum_bounding_rectangle(&poly);
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..200_000 {
        let a = PI * k as f64 / 200_000.0;
        let u = Point2::from_angle(a);
        let v = u.right_perp();
        let span = |d: Point2| {
            let (lo, hi) = poly
                .vertices()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.dot(d)), hi.max(p.dot(d))));
            hi - lo
        };
        let (w, h) = (span(u), span(v));
        if w * h < best.0 {
            // long side's direction
            best = (w * h, if w >= h { a } else { (a + PI / 2.0) % PI });
        }
    }
    assert!((theta - best.1).abs() < 1e-4, "{theta} vs sweep {}", best.1);
    assert!((theta - mbr.angle).abs() < 1e-12);
    assert!((dir.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn rotating_the_polygon_rotates_the_initialization() {
    for seed in 0..10u64 {
        let poly = generate_polygon(&PolygonSpec::parse_compact(&format!("random:20,{seed}")).unwrap()).unwrap();
        let n = 12;
        let r = (0.4 * poly.area() / (n as f64 * PI)).sqrt();
        let base = initialize(&poly, &InitParams::new(n, r)).unwrap().config;
        // keep the principal axis angle inside [0, pi): no axis flip
        let axis = minimum_bounding_rectangle(&poly).angle;
        let phi = (PI - axis) * (0.1 + 0.08 * seed as f64);
        let pivot = poly.vertex_centroid();
        let rotated = poly.transformed(phi, pivot, Vec2::ORIGIN);
        let moved = initialize(&rotated, &InitParams::new(n, r)).unwrap().config;
        for (a, b) in base.centers.iter().zip(&moved.centers) {
            let want = (*a - pivot).rotated(phi) + pivot;
            assert!(want.distance(*b) < 1e-9 * poly.diameter(), "seed {seed}: {want:?} vs {b:?}");
        }
    }
}

#[test]
fn small_counts_start_without_overlap() {
    for n in 1..=7 {
        let cfg = initialize(&square(50.0), &InitParams::new(n, 1.0)).unwrap().config;
        assert_eq!(cfg.len(), n);
        for d in pair_distances(&cfg.centers) {
            assert_eq!(lens_area(d, 1.0).unwrap(), 0.0);
        }
    }
}

#[test]
fn thin_triangle_filtering() {
    let tri = ConvexPolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(30.0, 0.0), Point2::new(15.0, 3.0)]).unwrap();
    let params = InitParams::new(30, 0.5);
    let lat = generate_hex_lattice(30, 0.5).unwrap();
    let (cfg, _) = fit_lattice(&lat, &tri, &params).unwrap();
    let out = filter_and_insert(&cfg, &tri, &params);
    assert!(out.len() <= 30);
    for &c in &out.centers {
        assert!(signed_distance(c, &tri) >= 0.5 * params.alpha_inset - tri.tolerance());
    }
}

#[test]
fn heptagon_nineteen_feasible() {
    let params = InitParams::new(19, 0.5);
    let out = initialize(&heptagon(), &params).unwrap();
    for &c in &out.config.centers[..out.config.len() - out.jittered] {
        assert!(signed_distance(c, &heptagon()) >= 0.5 * params.alpha_inset - 1e-9);
    }
}

// -------------------------------------------------------------- dynamics

#[test]
fn constant_force_follows_recurrence() {
    // center more than r beyond the bottom edge: overflow saturates at pi r^2
    let sq = square(10.0);
    let r = 1.0;
    let cfg = CircleConfiguration::new(vec![Point2::new(5.0, -40.0)], r).unwrap();
    let params = DynamicsParams::for_radius(r);
    let (mu, dt, f) = (params.mu, params.dt, PI * r * r);
    let mut s = ExpansionSystemState::at_rest(&cfg);
    let mut v = 0.0f64;
    for _ in 0..100 {
        s = integrate_step(&s, &sq, &params).unwrap();
        v = v * (1.0 - mu * dt) + f * dt;
        assert!((s.velocities[0].y - v).abs() <= 1e-12 * v);
        assert_eq!(s.velocities[0].x, 0.0);
    }
    assert!(s.positions[0].y < -r);
    assert!((v - f / mu).abs() < (f / mu) * (1.0 - mu * dt).powi(100) + 1e-12);
}

#[test]
fn usage_rate_examples() {
    let sq = square(10.0);
    let set = SampleSet::new(&sq, &EstimatorParams::monte_carlo(400_000, 9)).unwrap();
    let u = |pts: &[(f64, f64)]| {
        let cfg = CircleConfiguration::new(pts.iter().map(|&p| Point2::from(p)).collect(), 1.0).unwrap();
        usage_rate(&ExpansionSystemState::at_rest(&cfg), &set)
    };
    assert!((u(&[(5.0, 5.0)]) - 1.0).abs() < 0.03);
    assert!((u(&[(5.0, 5.0), (5.0, 5.0)]) - 0.5).abs() < 0.02);
    assert!((u(&[(5.0, 0.0)]) - 0.5).abs() < 0.02);
}

#[test]
fn single_circle_inflates_to_target() {
    let poly = heptagon();
    let params = DynamicsParams::for_radius(1.0);
    let init = CircleConfiguration::new(vec![poly.centroid()], 0.1).unwrap();
    let set = SampleSet::new(&poly, &EstimatorParams::monte_carlo(2_000_000, 1)).unwrap();
    let out = expand_radii(&poly, &params, &init, &set).unwrap();
    assert!(out.trace[..out.rounds].iter().all(|t| t.accepted));
    assert_eq!(out.state.radius, 1.0);
    assert!(signed_distance(out.state.positions[0], &poly) > 0.0);
}

#[test]
fn nineteen_circles_relaxation_helps_usage() {
    let sq = square(12.0);
    let r = 1.0;
    let init = initialize(&sq, &InitParams::new(19, 0.1 * r)).unwrap().config;
    let set = SampleSet::new(&sq, &EstimatorParams::monte_carlo(100_000, 5)).unwrap();
    let raw = usage_rate(&ExpansionSystemState::at_rest(&init.with_radius(r)), &set);
    let params = DynamicsParams::for_radius(r);
    let out = expand_radii(&sq, &params, &init, &set).unwrap();
    let fin = usage_rate(&out.state, &set);
    assert!(fin >= raw, "{fin} < {raw}");

    // radius monotone on accepts, step within bounds, bit-for-bit repeatable
    let accepted: Vec<f64> = out.trace[..out.rounds].iter().filter(|t| t.accepted).map(|t| t.radius).collect();
    assert!(accepted.windows(2).all(|w| w[0] <= w[1]));
    let again = expand_radii(&sq, &params, &init, &set).unwrap();
    assert_eq!(out, again);
}

// -------------------------------------------------------------- boundary

#[test]
fn encircling_points_on_heptagon() {
    let poly = heptagon();
    let set = generate_encircling_points(&poly, 20, 0.3, 1.0);
    let total: usize = set.per_edge_counts.iter().sum();
    assert!((7..=20).contains(&total));
    assert_eq!(set.len(), total);
    for p in &set.points {
        assert!((poly.edge_distance(p.edge, p.position) - 0.3).abs() < 1e-9);
        assert!(signed_distance(p.position, &poly) > 0.0);
    }
}

#[test]
fn lone_circle_returns_to_its_slot() {
    let sq = square(20.0);
    let r = 1.0;
    let cfg = CircleConfiguration::new(vec![Point2::new(7.0, -0.3)], r).unwrap();
    let params = LagrangianParams::for_radius(r);
    let out = encircle(&ExpansionSystemState::at_rest(&cfg), &sq, &params).unwrap();
    assert!(out.converged);
    let c = out.config.centers[0];
    // a step shorter than epsilon means the gradient is below epsilon / eta
    let slack = params.epsilon_conv / (params.eta * params.gamma.min(params.rho_b));
    assert!(c.y >= r - slack, "{c:?}");
    assert!((c - Point2::new(10.0, 1.0)).norm() <= slack, "{c:?}");
}

#[test]
fn lone_circle_objective_never_increases() {
    let sq = square(20.0);
    let r = 1.0;
    let cfg = CircleConfiguration::new(vec![Point2::new(12.5, 19.6)], r).unwrap();
    let mut params = LagrangianParams::for_radius(r);
    // single circle: eta (rho_b + rho_c) < 1
    assert!(params.eta * (params.rho_b + params.rho_c) < 1.0);
    let state = ExpansionSystemState::at_rest(&cfg);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        params.max_iters = k;
        let out = encircle(&state, &sq, &params).unwrap();
        // with the normal, slot and separation terms only
        let obj = penalty_objective(&out.config, &sq, &LagrangianParams { beta: 0.0, ..params.clone() });
        assert!(obj <= last + 1e-12, "iteration {k}: {obj} > {last}");
        last = obj;
    }
}

#[test]
fn two_circles_share_a_slot_without_overlapping() {
    let sq = square(20.0);
    let r = 1.0;
    let cfg = CircleConfiguration::new(vec![Point2::new(9.5, -0.2), Point2::new(10.5, -0.2)], r).unwrap();
    let out = encircle(&ExpansionSystemState::at_rest(&cfg), &sq, &LagrangianParams::for_radius(r)).unwrap();
    let d = out.config.centers[0].distance(out.config.centers[1]);
    assert!(d >= 2.0 * r * (1.0 - 0.05), "distance {d}");
    assert!(out.config.centers.iter().all(|&c| signed_distance(c, &sq) >= 0.0));
}
