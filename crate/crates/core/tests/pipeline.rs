use std::f64::consts::PI;

use covpack::config::{PolygonSpec, RunConfig};
use covpack::metrics::{RunStatus, SCHEMA_VERSION};
use covpack::pipeline::run_pipeline;
use covpack::svg::{render_report, SvgOptions};
use covpack::{geometry::signed_distance, ConvexPolygon, Error, Stage};

fn square_config(n: usize, r: f64) -> RunConfig {
    let mut c = RunConfig::new(PolygonSpec::parse_compact("rectangle:10,10").unwrap(), n, r);
    c.seed = 11;
    c
}

#[test]
fn one_circle() {
    let rep = run_pipeline(&square_config(1, 1.0)).unwrap();
    let se = (PI / 100.0 * (1.0 - PI / 100.0) / rep.estimator_meta.samples as f64).sqrt();
    assert!((rep.coverage_rate - PI / 100.0).abs() <= 3.0 * se);
    let poly = ConvexPolygon::new(rep.polygon.clone()).unwrap();
    assert!(signed_distance(rep.centers[0], &poly) >= 1.0);
    assert_eq!(rep.min_gap, None);
}

#[test]
fn seven_circles() {
    let rep = run_pipeline(&square_config(7, 1.0)).unwrap();
    assert_eq!(rep.status, RunStatus::Converged);
    assert!(rep.min_gap.unwrap() >= -0.05 * 2.0);
    let samples = rep.estimator_meta.samples as f64;
    let p = 7.0 * PI / 100.0;
    let est_err = (p * (1.0 - p) / samples).sqrt();
    // overlap allowance: what min_gap permits for every pair
    let allowance = 21.0 * covpack::geometry::lens_area(2.0 - 0.1, 1.0).unwrap() / 100.0;
    assert!(rep.coverage_rate >= p - 2.0 * est_err - allowance);
    assert!(rep.coverage_rate >= rep.init.metrics.coverage_rate);
}

#[test]
fn report_is_deterministic_and_round_trips() {
    let cfg = square_config(12, 0.9);
    let a = run_pipeline(&cfg).unwrap();
    let b = run_pipeline(&cfg).unwrap();
    assert_eq!(a.to_json_without_timing(), b.to_json_without_timing());
    let svg = SvgOptions::default();
    assert_eq!(render_report(&a, &svg).unwrap(), render_report(&b, &svg).unwrap());

    let json = serde_json::to_string(&a).unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["schema_version"], SCHEMA_VERSION);
    for key in [
        "coverage_rate", "usage_rate", "boundary_adaptability", "min_gap", "distribution_quality",
        "uniformity_index", "wall_time_ms", "estimator_meta", "metric_conventions",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let back: covpack::metrics::RunReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);
}

#[test]
fn coverage_rate_and_usage_rate_agree() {
    let rep = run_pipeline(&square_config(9, 0.8)).unwrap();
    let area = 100.0;
    let lhs = rep.coverage_rate * area;
    let rhs = rep.usage_rate * 9.0 * PI * 0.8 * 0.8;
    assert!((lhs - rhs).abs() <= 1e-9 * lhs);
}

#[cfg(feature = "parallel")]
#[test]
fn thread_count_does_not_change_results() {
    let cfg = square_config(30, 0.8);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| run_pipeline(&cfg).unwrap());
    let b = four.install(|| run_pipeline(&cfg).unwrap());
    assert_eq!(a.to_json_without_timing(), b.to_json_without_timing());
}

#[test]
fn round_cap_reports_non_convergence() {
    let mut cfg = square_config(19, 1.0);
    cfg.dynamics.max_rounds = Some(2);
    let rep = run_pipeline(&cfg).unwrap();
    assert_eq!(rep.status, RunStatus::NonConvergence);
    assert!(rep.dynamics.hit_round_cap);
    assert_eq!(rep.dynamics.rounds, 2);
    assert_eq!(rep.centers.len(), 19);
}

#[test]
fn invalid_input_is_labelled() {
    let bad = RunConfig::new(PolygonSpec::parse_compact("random:2,1").unwrap(), 3, 1.0);
    let err = run_pipeline(&bad).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(matches!(err.root(), Error::DegenerateInput(_)));

    let mut cfg = square_config(3, 1.0);
    cfg.init.alpha_safety = Some(0.99);
    assert!(matches!(run_pipeline(&cfg).unwrap_err().root(), Error::InvalidArgument(_)));

    let e = Error::NonConvergence { iterations: 3 }.at(Stage::Dynamics);
    assert_eq!(e.exit_code(), 3);
    assert!(e.to_string().contains("dynamics"));
}

#[test]
fn config_files_load() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("run.toml");
    std::fs::write(
        &toml_path,
        "n = 4\nr = 1.0\n[polygon]\nshape = { kind = \"regular_ngon\", sides = 5, circumradius = 6.0 }\nrotation = 0.2\n",
    )
    .unwrap();
    let cfg = RunConfig::load(&toml_path).unwrap();
    let json_path = dir.path().join("run.json");
    std::fs::write(&json_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(RunConfig::load(&json_path).unwrap(), cfg);
    let missing = RunConfig::load(&dir.path().join("nope.toml")).unwrap_err();
    assert_eq!(missing.exit_code(), 4);
}
