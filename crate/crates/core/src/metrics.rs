//! Scores for a finished configuration and the JSON run report.
//!
//! Coverage rate and usage rate follow directly from the covered area.
//! Minimum gap, uniformity index, boundary adaptability and distribution
//! quality are conventions of this crate; their definitions are written into
//! every report under `metric_conventions`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boundary::EncircleRecord;
use crate::dynamics::ExpansionRecord;
use crate::geometry::{
    cell_areas, overflow_area, signed_distance, CircleConfiguration, ConvexPolygon, EstimatorMethod,
    Point2, SampleSet,
};

pub const SCHEMA_VERSION: u32 = 1;

/// `A_cover / area(P)`.
pub fn coverage_rate(poly: &ConvexPolygon, cfg: &CircleConfiguration, samples: &SampleSet) -> f64 {
    (samples.covered_area(cfg) / poly.area()).clamp(0.0, 1.0)
}

/// `A_cover / (n pi r^2)`.
pub fn usage_rate(cfg: &CircleConfiguration, samples: &SampleSet) -> f64 {
    if cfg.is_empty() {
        return 0.0;
    }
    (samples.covered_area(cfg) / cfg.total_disc_area()).clamp(0.0, 1.0)
}

/// Smallest `|c_i - c_j| - 2r`; negative values measure the worst overlap.
/// `None` for fewer than two circles.
pub fn min_gap(cfg: &CircleConfiguration) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, &a) in cfg.centers.iter().enumerate() {
        for &b in &cfg.centers[i + 1..] {
            let g = a.distance(b) - 2.0 * cfg.radius;
            best = Some(best.map_or(g, |x| x.min(g)));
        }
    }
    best
}

/// Coefficient of variation (population standard deviation over mean) of
/// the clipped Voronoi cell areas; 0 is perfectly even.
pub fn uniformity_index(poly: &ConvexPolygon, cfg: &CircleConfiguration) -> f64 {
    let areas = cell_areas(&cfg.centers, poly);
    if areas.len() < 2 {
        return 0.0;
    }
    let n = areas.len() as f64;
    let mean = areas.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return 0.0;
    }
    let var = areas.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Mean fraction of disc area lost beyond the nearest edge line, with the
/// center distance clamped to `[0, r]`.
pub fn boundary_adaptability(poly: &ConvexPolygon, cfg: &CircleConfiguration) -> f64 {
    if cfg.is_empty() {
        return 0.0;
    }
    let r = cfg.radius;
    let disc = std::f64::consts::PI * r * r;
    cfg.centers
        .iter()
        .map(|&c| overflow_area(signed_distance(c, poly).clamp(0.0, r), r) / disc)
        .sum::<f64>()
        / cfg.len() as f64
}

/// Mean nearest-neighbour distance over the close-packed spacing `2r`.
/// `None` for fewer than two circles.
pub fn distribution_quality(cfg: &CircleConfiguration) -> Option<f64> {
    let n = cfg.len();
    if n < 2 {
        return None;
    }
    let total: f64 = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| cfg.centers[i].distance(cfg.centers[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Some(total / n as f64 / (2.0 * cfg.radius))
}

/// Every metric that depends only on geometry and the sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub coverage_rate: f64,
    pub usage_rate: f64,
    pub boundary_adaptability: f64,
    pub min_gap: Option<f64>,
    pub distribution_quality: Option<f64>,
    pub uniformity_index: f64,
}

impl Metrics {
    pub fn compute(poly: &ConvexPolygon, cfg: &CircleConfiguration, samples: &SampleSet) -> Self {
        let covered = samples.covered_area(cfg);
        Metrics {
            coverage_rate: (covered / poly.area()).clamp(0.0, 1.0),
            usage_rate: if cfg.is_empty() {
                0.0
            } else {
                (covered / cfg.total_disc_area()).clamp(0.0, 1.0)
            },
            boundary_adaptability: boundary_adaptability(poly, cfg),
            min_gap: min_gap(cfg),
            distribution_quality: distribution_quality(cfg),
            uniformity_index: uniformity_index(poly, cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorMeta {
    pub method: EstimatorMethod,
    /// Sample points actually used (inside the polygon).
    pub samples: usize,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSummary {
    pub beta: Option<f64>,
    pub filtered: usize,
    pub inserted: usize,
    pub jittered: usize,
    /// Metrics of the initial centers evaluated at the target radius.
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub rounds: usize,
    pub inflated_radius: f64,
    pub hit_round_cap: bool,
    pub equilibrium: bool,
    pub trace: Vec<ExpansionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySummary {
    pub moved: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub alpha_offset: f64,
    /// Metrics just before encirclement.
    pub metrics_before: Metrics,
    pub trace: Vec<EncircleRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    NonConvergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub status: RunStatus,
    pub coverage_rate: f64,
    pub usage_rate: f64,
    pub boundary_adaptability: f64,
    pub min_gap: Option<f64>,
    pub distribution_quality: Option<f64>,
    pub uniformity_index: f64,
    pub wall_time_ms: f64,
    pub estimator_meta: EstimatorMeta,
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
    pub polygon: Vec<Point2>,
    pub centers: Vec<Point2>,
    pub init: InitSummary,
    pub dynamics: DynamicsSummary,
    pub boundary: BoundarySummary,
    pub metric_conventions: BTreeMap<String, String>,
}

impl RunReport {
    pub fn metrics(&self) -> Metrics {
        Metrics {
            coverage_rate: self.coverage_rate,
            usage_rate: self.usage_rate,
            boundary_adaptability: self.boundary_adaptability,
            min_gap: self.min_gap,
            distribution_quality: self.distribution_quality,
            uniformity_index: self.uniformity_index,
        }
    }

    pub fn config(&self) -> CircleConfiguration {
        CircleConfiguration {
            centers: self.centers.clone(),
            radius: self.radius,
        }
    }

    /// JSON with `wall_time_ms` zeroed, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = 0.0;
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }
}

pub fn metric_conventions() -> BTreeMap<String, String> {
    [
        ("coverage_rate", "covered area / polygon area"),
        ("usage_rate", "covered area / (n * pi * r^2)"),
        (
            "min_gap",
            "convention: min over pairs of (center distance - 2r); negative = overlap",
        ),
        (
            "uniformity_index",
            "convention: coefficient of variation of clipped Voronoi cell areas",
        ),
        (
            "boundary_adaptability",
            "convention: mean fraction of disc area beyond the nearest edge line",
        ),
        (
            "distribution_quality",
            "convention: mean nearest-neighbour distance / 2r",
        ),
        ("wall_time_ms", "wall-clock time of the whole run"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}
