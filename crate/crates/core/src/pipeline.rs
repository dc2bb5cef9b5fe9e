//! The full run: polygon, initialization, inflation, boundary stage, scoring.

use std::time::Instant;

use crate::boundary::encircle;
use crate::config::RunConfig;
use crate::dynamics::expand_radii_capped;
use crate::error::{Result, Stage};
use crate::geometry::{ConvexPolygon, EstimatorMethod, SampleSet};
use crate::init::initialize;
use crate::metrics::{
    metric_conventions, BoundarySummary, DynamicsSummary, EstimatorMeta, InitSummary, Metrics,
    RunReport, RunStatus, SCHEMA_VERSION,
};

/// Initialization radius as a fraction of the target.
pub const START_FRACTION: f64 = 0.1;

/// Runs every stage on `config`. A run that hits an iteration cap still
/// returns a report, with `status = non_convergence`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let started = Instant::now();
    config.validate()?;
    let poly = crate::config::generate_polygon(&config.polygon).map_err(|e| e.at(Stage::Polygon))?;
    let mut report = run_on(&poly, config)?;
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// [`run_pipeline`] on an already-built polygon. `wall_time_ms` is left 0.
pub fn run_on(poly: &ConvexPolygon, config: &RunConfig) -> Result<RunReport> {
    let r = config.r;
    let est = config.estimator_params();
    let samples = SampleSet::new(poly, &est).map_err(|e| e.at(Stage::Metrics))?;

    let init = initialize(poly, &config.init_params(START_FRACTION * r))
        .map_err(|e| e.at(Stage::Init))?;
    let init_metrics = Metrics::compute(poly, &init.config.with_radius(r), &samples);

    let expansion = expand_radii_capped(poly, &config.dynamics_params(), &init.config, &samples)
        .map_err(|e| e.at(Stage::Dynamics))?;
    let before = Metrics::compute(poly, &expansion.state.config(), &samples);

    let lagrangian = config.lagrangian_params();
    let enc = encircle(&expansion.state, poly, &lagrangian).map_err(|e| e.at(Stage::Boundary))?;
    let m = Metrics::compute(poly, &enc.config, &samples);

    let status = if expansion.hit_round_cap || !enc.converged {
        RunStatus::NonConvergence
    } else {
        RunStatus::Converged
    };
    let estimator_meta = EstimatorMeta {
        method: est.method,
        samples: samples.len(),
        resolution: (est.method == EstimatorMethod::Grid).then_some(est.resolution),
        seed: (est.method == EstimatorMethod::MonteCarlo).then_some(est.seed),
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        status,
        coverage_rate: m.coverage_rate,
        usage_rate: m.usage_rate,
        boundary_adaptability: m.boundary_adaptability,
        min_gap: m.min_gap,
        distribution_quality: m.distribution_quality,
        uniformity_index: m.uniformity_index,
        wall_time_ms: 0.0,
        estimator_meta,
        n: config.n,
        radius: r,
        seed: config.seed,
        polygon: poly.vertices().to_vec(),
        centers: enc.config.centers.clone(),
        init: InitSummary {
            beta: init.beta,
            filtered: init.filtered,
            inserted: init.inserted,
            jittered: init.jittered,
            metrics: init_metrics,
        },
        dynamics: DynamicsSummary {
            rounds: expansion.rounds,
            inflated_radius: expansion.inflated_radius,
            hit_round_cap: expansion.hit_round_cap,
            equilibrium: expansion.equilibrium,
            trace: expansion.trace,
        },
        boundary: BoundarySummary {
            moved: enc.moved,
            iterations: enc.iterations,
            converged: enc.converged,
            alpha_offset: lagrangian.alpha_offset,
            metrics_before: before,
            trace: enc.trace,
        },
        metric_conventions: metric_conventions(),
    })
}
