//! Estimators for the area of `P ∩ (C_1 ∪ ... ∪ C_n)`.
//!
//! Samples are drawn once into a [`SampleSet`] and reused, so estimates for
//! different configurations are compared on identical points. Monte Carlo
//! samples come in fixed-size batches, each from its own ChaCha stream, which
//! makes the set independent of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CircleConfiguration, ConvexPolygon, Point2, Vec2};
use crate::error::{Error, Result};
use crate::par;

const BATCH: usize = 4096;
const COUNT_CHUNK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMethod {
    /// Uniform rejection sampling in the polygon's bounding box.
    MonteCarlo,
    /// Cell midpoints of a `resolution x resolution` grid over the bounding box.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorParams {
    pub method: EstimatorMethod,
    /// Accepted Monte Carlo samples inside the polygon.
    pub samples: usize,
    /// Grid cells per bounding-box axis.
    pub resolution: usize,
    pub seed: u64,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            method: EstimatorMethod::MonteCarlo,
            samples: 100_000,
            resolution: 400,
            seed: 0,
        }
    }
}

impl EstimatorParams {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        EstimatorParams {
            method: EstimatorMethod::MonteCarlo,
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn grid(resolution: usize) -> Self {
        EstimatorParams {
            method: EstimatorMethod::Grid,
            resolution,
            ..Default::default()
        }
    }
}

/// Fixed sample points inside a polygon.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<Point2>,
    domain_area: f64,
    method: EstimatorMethod,
    /// Grid cell diagonal; zero for Monte Carlo.
    cell_diagonal: f64,
}

impl SampleSet {
    pub fn new(poly: &ConvexPolygon, params: &EstimatorParams) -> Result<Self> {
        match params.method {
            EstimatorMethod::MonteCarlo => {
                if params.samples == 0 {
                    return Err(Error::InvalidArgument("sample count must be positive".into()));
                }
                Ok(Self::monte_carlo(poly, params.samples, params.seed))
            }
            EstimatorMethod::Grid => {
                if params.resolution == 0 {
                    return Err(Error::InvalidArgument("grid resolution must be positive".into()));
                }
                Self::grid(poly, params.resolution)
            }
        }
    }

    fn monte_carlo(poly: &ConvexPolygon, samples: usize, seed: u64) -> Self {
        let (lo, hi) = poly.bounding_box();
        let batches = samples.div_ceil(BATCH);
        let chunks = par::map_indexed(batches, |b| {
            let want = if b + 1 == batches {
                samples - b * BATCH
            } else {
                BATCH
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let mut out = Vec::with_capacity(want);
            while out.len() < want {
                let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                if poly.contains(p) {
                    out.push(p);
                }
            }
            out
        });
        SampleSet {
            points: chunks.concat(),
            domain_area: poly.area(),
            method: EstimatorMethod::MonteCarlo,
            cell_diagonal: 0.0,
        }
    }

    fn grid(poly: &ConvexPolygon, k: usize) -> Result<Self> {
        let (lo, hi) = poly.bounding_box();
        let hx = (hi.x - lo.x) / k as f64;
        let hy = (hi.y - lo.y) / k as f64;
        let rows = par::map_indexed(k, |iy| {
            (0..k)
                .map(|ix| {
                    Point2::new(lo.x + (ix as f64 + 0.5) * hx, lo.y + (iy as f64 + 0.5) * hy)
                })
                .filter(|&p| poly.contains(p))
                .collect::<Vec<_>>()
        });
        let points = rows.concat();
        if points.is_empty() {
            return Err(Error::InvalidArgument("grid too coarse: no cell inside polygon".into()));
        }
        Ok(SampleSet {
            points,
            domain_area: poly.area(),
            method: EstimatorMethod::Grid,
            cell_diagonal: hx.hypot(hy),
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domain_area(&self) -> f64 {
        self.domain_area
    }

    pub fn method(&self) -> EstimatorMethod {
        self.method
    }

    /// Number of samples inside at least one circle.
    pub fn covered_count(&self, cfg: &CircleConfiguration) -> u64 {
        if cfg.is_empty() {
            return 0;
        }
        let index = CoverIndex::new(cfg, &self.points);
        par::sum_chunks(&self.points, COUNT_CHUNK, |chunk| {
            chunk.iter().filter(|&&p| index.covers(p)).count() as u64
        })
    }

    /// Per-sample coverage flags, in sample order.
    pub fn covered_mask(&self, cfg: &CircleConfiguration) -> Vec<bool> {
        let index = CoverIndex::new(cfg, &self.points);
        par::map_slice(&self.points, |&p| index.covers(p))
    }

    /// Estimated covered area, clamped to `[0, min(area(P), n pi r^2)]`.
    pub fn covered_area(&self, cfg: &CircleConfiguration) -> f64 {
        let frac = self.covered_count(cfg) as f64 / self.len() as f64;
        (self.domain_area * frac).min(cfg.total_disc_area())
    }

    /// Error scale of an estimate: one binomial standard error for Monte
    /// Carlo; for the grid, a bound from the cells straddling the circle and
    /// polygon boundaries.
    pub fn error_bound(&self, cfg: &CircleConfiguration, estimate: f64) -> f64 {
        match self.method {
            EstimatorMethod::MonteCarlo => {
                let p = (estimate / self.domain_area).clamp(0.0, 1.0);
                self.domain_area * (p * (1.0 - p) / self.len() as f64).sqrt()
            }
            EstimatorMethod::Grid => {
                let boundary = cfg.len() as f64 * std::f64::consts::TAU * cfg.radius;
                boundary * self.cell_diagonal
            }
        }
    }

    /// The same samples carried along with a rigid motion of the domain.
    pub fn transformed(&self, angle: f64, pivot: Point2, offset: Vec2) -> SampleSet {
        SampleSet {
            points: self
                .points
                .iter()
                .map(|&p| (p - pivot).rotated(angle) + pivot + offset)
                .collect(),
            ..self.clone()
        }
    }
}

/// Convenience wrapper: draws a fresh sample set and estimates once.
pub fn covered_area(
    poly: &ConvexPolygon,
    cfg: &CircleConfiguration,
    params: &EstimatorParams,
) -> Result<f64> {
    Ok(SampleSet::new(poly, params)?.covered_area(cfg))
}

/// Uniform bucket grid of circles over the sample bounding box.
struct CoverIndex<'a> {
    centers: &'a [Point2],
    r2: f64,
    origin: Point2,
    inv_cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl<'a> CoverIndex<'a> {
    const MAX_CELLS_PER_AXIS: usize = 1024;

    fn new(cfg: &'a CircleConfiguration, samples: &[Point2]) -> Self {
        let r = cfg.radius;
        let (mut lo, mut hi) = (Point2::new(f64::MAX, f64::MAX), Point2::new(f64::MIN, f64::MIN));
        for p in samples {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        if samples.is_empty() {
            lo = Point2::ORIGIN;
            hi = Point2::ORIGIN;
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(r);
        let cell = (2.0 * r).max(span / Self::MAX_CELLS_PER_AXIS as f64);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).min(Self::MAX_CELLS_PER_AXIS + 1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).min(Self::MAX_CELLS_PER_AXIS + 1);
        let inv_cell = 1.0 / cell;

        let range = |c: f64, lo: f64, n: usize| -> Option<(usize, usize)> {
            let a = ((c - r - lo) * inv_cell).floor();
            let b = ((c + r - lo) * inv_cell).floor();
            if b < 0.0 || a >= n as f64 {
                return None;
            }
            Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
        };
        let mut counts = vec![0u32; nx * ny + 1];
        let mut spans = Vec::with_capacity(cfg.len());
        for c in &cfg.centers {
            let s = range(c.x, lo.x, nx).zip(range(c.y, lo.y, ny));
            if let Some(((x0, x1), (y0, y1))) = s {
                for iy in y0..=y1 {
                    for ix in x0..=x1 {
                        counts[iy * nx + ix + 1] += 1;
                    }
                }
            }
            spans.push(s);
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; *counts.last().unwrap() as usize];
        for (i, s) in spans.into_iter().enumerate() {
            if let Some(((x0, x1), (y0, y1))) = s {
                for iy in y0..=y1 {
                    for ix in x0..=x1 {
                        let slot = &mut fill[iy * nx + ix];
                        items[*slot as usize] = i as u32;
                        *slot += 1;
                    }
                }
            }
        }
        CoverIndex {
            centers: &cfg.centers,
            r2: r * r,
            origin: lo,
            inv_cell,
            nx,
            ny,
            starts: counts,
            items,
        }
    }

    #[inline]
    fn covers(&self, p: Point2) -> bool {
        let ix = ((p.x - self.origin.x) * self.inv_cell).floor();
        let iy = ((p.y - self.origin.y) * self.inv_cell).floor();
        if ix < 0.0 || iy < 0.0 {
            return false;
        }
        let (ix, iy) = (ix as usize, iy as usize);
        if ix >= self.nx || iy >= self.ny {
            return false;
        }
        let cell = iy * self.nx + ix;
        let (a, b) = (self.starts[cell] as usize, self.starts[cell + 1] as usize);
        self.items[a..b]
            .iter()
            .any(|&i| (p - self.centers[i as usize]).norm_sq() <= self.r2)
    }
}
