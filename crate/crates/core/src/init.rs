//! Structure-preserving initialization from a hexagonal close packing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    minimum_bounding_rectangle, signed_distance, CircleConfiguration, ConvexPolygon, Point2, Vec2,
};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;
/// `cos(k pi/3)` and `sin(k pi/3)` for `k = 0..6`.
const COS6: [f64; 6] = [1.0, 0.5, -0.5, -1.0, -0.5, 0.5];
const SIN6: [f64; 6] = [0.0, SQRT3_2, SQRT3_2, 0.0, -SQRT3_2, -SQRT3_2];

/// Lattice coordinates of one point: layer `l`, sector `k`, slot `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeIndex {
    pub layer: usize,
    pub sector: usize,
    pub slot: usize,
}

/// Hexagonal close packing centred on the origin with spacing `2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HexLattice {
    pub points: Vec<Point2>,
    pub indices: Vec<LatticeIndex>,
    /// Number of layers generated (the last may be truncated).
    pub layers: usize,
    pub spacing: f64,
    /// Axis-aligned extent `(w_h, h_h)` of the centers.
    pub bounding_box: (f64, f64),
}

/// Points in the first `layers` full layers: `1 + 3L(L+1)`.
pub fn full_layer_count(layers: usize) -> usize {
    1 + 3 * layers * (layers + 1)
}

/// Generates concentric hexagonal layers until at least `n` points exist and
/// keeps the `n` nearest the origin (ties by polar angle, then index).
///
/// Point `(l, k, m)` sits at `2rl e^{ik pi/3} + 2rm e^{i(k+2) pi/3}` for
/// `k < 6`, `m < l`.
pub fn generate_hex_lattice(n: usize, r: f64) -> Result<HexLattice> {
    if n < 1 {
        return Err(Error::InvalidArgument("lattice needs at least one point".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let mut layers = 0;
    while full_layer_count(layers) < n {
        layers += 1;
    }
    let spacing = 2.0 * r;

    // (squared norm in spacing units, angle, index, point)
    let mut all: Vec<(usize, f64, LatticeIndex, Point2)> = Vec::with_capacity(full_layer_count(layers));
    let origin = LatticeIndex {
        layer: 0,
        sector: 0,
        slot: 0,
    };
    all.push((0, 0.0, origin, Point2::ORIGIN));
    for l in 1..=layers {
        for k in 0..6 {
            let k2 = (k + 2) % 6;
            for m in 0..l {
                let (lf, mf) = (l as f64, m as f64);
                let p = Point2::new(
                    spacing * (lf * COS6[k] + mf * COS6[k2]),
                    spacing * (lf * SIN6[k] + mf * SIN6[k2]),
                );
                let key = l * l + m * m - l * m;
                let angle = p.y.atan2(p.x).rem_euclid(std::f64::consts::TAU);
                let idx = LatticeIndex {
                    layer: l,
                    sector: k,
                    slot: m,
                };
                all.push((key, angle, idx, p));
            }
        }
    }
    all.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    // consecutive sectors never emit the same point; guard anyway
    let tol = 1e-9 * r;
    let mut points: Vec<Point2> = Vec::with_capacity(n);
    let mut indices = Vec::with_capacity(n);
    for (_, _, idx, p) in all {
        if points.len() == n {
            break;
        }
        if points.iter().any(|q| q.distance(p) <= tol) {
            continue;
        }
        points.push(p);
        indices.push(idx);
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in &points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    Ok(HexLattice {
        points,
        indices,
        layers,
        spacing,
        bounding_box: (hi.x - lo.x, hi.y - lo.y),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitParams {
    /// Requested circle count.
    pub n: usize,
    /// Circle radius used for fitting and filtering.
    pub r: f64,
    /// Safety coefficient on the lattice scale factor, in `(0.9, 0.95)`.
    pub alpha_safety: f64,
    /// Circles with `signed_distance < r * alpha_inset` are filtered out.
    pub alpha_inset: f64,
    pub corner_insertion: bool,
    /// Inserted circles must keep `distance >= 2r (1 - overlap_tolerance)`.
    pub overlap_tolerance: f64,
    /// Seed for the jitter of circles that could not be placed.
    pub seed: u64,
}

impl Default for InitParams {
    fn default() -> Self {
        InitParams {
            n: 1,
            r: 1.0,
            alpha_safety: 0.92,
            alpha_inset: 0.98,
            corner_insertion: true,
            overlap_tolerance: 0.05,
            seed: 0,
        }
    }
}

impl InitParams {
    pub fn new(n: usize, r: f64) -> Self {
        InitParams {
            n,
            r,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.r)));
        }
        if !(self.alpha_safety > 0.9 && self.alpha_safety < 0.95) {
            return Err(Error::InvalidArgument(format!(
                "alpha_safety must lie in (0.9, 0.95), got {}",
                self.alpha_safety
            )));
        }
        if !(self.alpha_inset >= 0.0 && self.alpha_inset.is_finite()) {
            return Err(Error::InvalidArgument("alpha_inset must be non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_tolerance) {
            return Err(Error::InvalidArgument("overlap_tolerance must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Long-side direction of the minimum bounding rectangle and its angle in
/// `[0, pi)`.
pub fn principal_direction(poly: &ConvexPolygon) -> (Vec2, f64) {
    let m = minimum_bounding_rectangle(poly);
    (m.direction, m.angle)
}

/// Rotates the lattice onto the principal direction, scales it by
/// `beta = alpha * min((w_p - 2r)/w_h, (h_p - 2r)/h_h)` and centres it on the
/// vertex mean. Lattice axes with zero extent do not constrain `beta`.
pub fn fit_lattice(
    lattice: &HexLattice,
    poly: &ConvexPolygon,
    params: &InitParams,
) -> Result<(CircleConfiguration, f64)> {
    params.validate()?;
    let c = poly.vertex_centroid();
    let (w_h, h_h) = lattice.bounding_box;
    let eps = 1e-12 * lattice.spacing;
    if w_h <= eps && h_h <= eps {
        return Ok((CircleConfiguration::new(vec![c; lattice.points.len()], params.r)?, 1.0));
    }
    let mbr = minimum_bounding_rectangle(poly);
    let mut ratio = f64::INFINITY;
    if w_h > eps {
        ratio = ratio.min((mbr.width - 2.0 * params.r) / w_h);
    }
    if h_h > eps {
        ratio = ratio.min((mbr.height - 2.0 * params.r) / h_h);
    }
    let beta = ratio * params.alpha_safety;
    if !(beta > 0.0) {
        return Err(Error::InfeasibleFit { beta });
    }
    let centers = lattice
        .points
        .iter()
        .map(|&z| z.rotated(mbr.angle) * beta + c)
        .collect();
    Ok((CircleConfiguration::new(centers, params.r)?, beta))
}

fn fits(candidate: Point2, placed: &[Point2], min_dist: f64) -> bool {
    let d2 = min_dist * min_dist;
    placed.iter().all(|&p| (p - candidate).norm_sq() >= d2)
}

/// Center tangent to both edges at vertex `j`, on the angle bisector.
pub fn corner_position(poly: &ConvexPolygon, j: usize, r: f64) -> Point2 {
    let n = poly.len();
    let v = poly.vertex(j);
    let u1 = (poly.vertex(j + n - 1) - v).normalized().expect("non-degenerate edge");
    let u2 = (poly.vertex(j + 1) - v).normalized().expect("non-degenerate edge");
    let bisector = (u1 + u2).normalized().expect("convex corner");
    let half = 0.5 * u1.dot(u2).clamp(-1.0, 1.0).acos();
    v + bisector * (r / half.sin())
}

/// Drops circles whose center is closer than `r * alpha_inset` to the
/// boundary, then greedily inserts circles at the corners and along the edges
/// (tangent to the boundary, without overlapping) until `n` are placed or no
/// slot remains.
pub fn filter_and_insert(
    cfg: &CircleConfiguration,
    poly: &ConvexPolygon,
    params: &InitParams,
) -> CircleConfiguration {
    let r = cfg.radius;
    let mut placed: Vec<Point2> = cfg
        .centers
        .iter()
        .copied()
        .filter(|&c| signed_distance(c, poly) >= r * params.alpha_inset)
        .collect();
    if params.corner_insertion && placed.len() < params.n {
        let min_dist = 2.0 * r * (1.0 - params.overlap_tolerance);
        let feasible = |c: Point2| signed_distance(c, poly) >= r - 1e-9 * poly.diameter();
        for j in 0..poly.len() {
            if placed.len() >= params.n {
                break;
            }
            let c = corner_position(poly, j, r);
            if feasible(c) && fits(c, &placed, min_dist) {
                placed.push(c);
            }
        }
        let step = 0.5 * r;
        'edges: for j in 0..poly.len() {
            let e = poly.edge(j);
            let (u, len) = (e.direction() * (1.0 / e.length()), e.length());
            let nrm = poly.inward_normal(j);
            let mut s = r;
            while s <= len - r + 1e-12 {
                if placed.len() >= params.n {
                    break 'edges;
                }
                let c = e.p1() + u * s + nrm * r;
                if feasible(c) && fits(c, &placed, min_dist) {
                    placed.push(c);
                }
                s += step;
            }
        }
    }
    placed.truncate(params.n);
    CircleConfiguration {
        centers: placed,
        radius: r,
    }
}

/// Result of the full initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct InitOutcome {
    pub config: CircleConfiguration,
    /// Lattice scale factor; `None` when the fit was infeasible.
    pub beta: Option<f64>,
    pub filtered: usize,
    pub inserted: usize,
    /// Circles placed by jitter around the centroid.
    pub jittered: usize,
}

/// Lattice generation, fitting, filtering and insertion. Always returns
/// exactly `n` circles: any deficit is placed near the centroid with a small
/// seeded jitter and left for the relaxation to spread out.
pub fn initialize(poly: &ConvexPolygon, params: &InitParams) -> Result<InitOutcome> {
    params.validate()?;
    let lattice = generate_hex_lattice(params.n, params.r)?;
    let (fitted, beta) = match fit_lattice(&lattice, poly, params) {
        Ok((cfg, beta)) => (cfg, Some(beta)),
        Err(Error::InfeasibleFit { .. }) => (
            CircleConfiguration::new(vec![poly.vertex_centroid()], params.r)?,
            None,
        ),
        Err(e) => return Err(e),
    };
    let out = filter_and_insert(&fitted, poly, params);
    let kept = fitted
        .centers
        .iter()
        .filter(|&&c| signed_distance(c, poly) >= params.r * params.alpha_inset)
        .count()
        .min(params.n);
    let filtered = fitted.len() - kept;
    let inserted = out.len() - kept;
    let mut centers = out.centers;
    let jittered = params.n - centers.len();
    if jittered > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let c = poly.centroid();
        let reach = 0.1 * params.r;
        for _ in 0..jittered {
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho = reach * rng.gen_range(0.0f64..1.0).sqrt();
            centers.push(c + Point2::from_angle(a) * rho);
        }
    }
    Ok(InitOutcome {
        config: CircleConfiguration::new(centers, params.r)?,
        beta,
        filtered,
        inserted,
        jittered,
    })
}
