//! Retrieval of circles that overflow the polygon boundary.
//!
//! Overflowing circles descend a penalized objective: a quadratic penalty on
//! edge violations `g_j = r - d_j` pushes them inward along edge normals, a
//! quadratic penalty on overlaps `h_ij = 2r - |c_i - c_j|` keeps them apart,
//! and an attraction to the nearest boundary encircling point, projected onto
//! the nearest edge's tangent, slides them along the boundary. Circles that do
//! not overflow stay fixed but still repel. Updates are simultaneous and each
//! iterate is projected back into the polygon.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{separate_coincident, ExpansionSystemState};
use crate::error::{Error, Result};
use crate::geometry::{signed_distance, CircleConfiguration, ConvexPolygon, Point2, Vec2};
use crate::par;

/// One target point: slot `slot` (1-based) on edge `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EncirclingPoint {
    pub edge: usize,
    pub slot: usize,
    pub position: Point2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryEncirclingPointSet {
    pub points: Vec<EncirclingPoint>,
    pub offset_alpha: f64,
    pub per_edge_counts: Vec<usize>,
}

impl BoundaryEncirclingPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest point to `c`; ties go to the lowest `(edge, slot)`.
    pub fn nearest(&self, c: Point2) -> &EncirclingPoint {
        let mut best = &self.points[0];
        let mut best_d = (best.position - c).norm_sq();
        for p in &self.points[1..] {
            let d = (p.position - c).norm_sq();
            if d < best_d {
                best = p;
                best_d = d;
            }
        }
        best
    }
}

/// Evenly spaced targets offset `alpha r` inside each edge. Edge `j` gets
/// `max(1, floor(n |e_j| / L))` points at parameters `(l - 0.5) / n_j`.
pub fn generate_encircling_points(
    poly: &ConvexPolygon,
    n: usize,
    r: f64,
    alpha_offset: f64,
) -> BoundaryEncirclingPointSet {
    let perimeter = poly.perimeter();
    let mut points = Vec::new();
    let mut per_edge_counts = Vec::with_capacity(poly.len());
    for j in 0..poly.len() {
        let e = poly.edge(j);
        let n_j = ((n as f64 * e.length() / perimeter).floor() as usize).max(1);
        let offset = poly.inward_normal(j) * (alpha_offset * r);
        for l in 1..=n_j {
            let t = (l as f64 - 0.5) / n_j as f64;
            points.push(EncirclingPoint {
                edge: j,
                slot: l,
                position: e.p1() + e.direction() * t + offset,
            });
        }
        per_edge_counts.push(n_j);
    }
    BoundaryEncirclingPointSet {
        points,
        offset_alpha: alpha_offset,
        per_edge_counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianParams {
    /// Weight of the boundary distance term in the reported objective.
    pub beta: f64,
    pub rho_b: f64,
    pub rho_c: f64,
    /// Attraction towards encircling points.
    pub gamma: f64,
    /// Learning rate.
    pub eta: f64,
    /// Stop once every center moves less than this per iteration.
    pub epsilon_conv: f64,
    /// Encircling point offset as a multiple of `r`, in `[0, 1]`.
    pub alpha_offset: f64,
    /// Desired center standoff for the boundary distance term, `>= 1`.
    pub alpha_standoff: f64,
    pub max_iters: usize,
    /// Enable first-order multiplier updates between descent rounds.
    pub multiplier_updates: bool,
    pub outer_rounds: usize,
}

impl LagrangianParams {
    pub fn for_radius(r: f64) -> Self {
        LagrangianParams {
            beta: 1.0,
            rho_b: 10.0,
            rho_c: 10.0,
            gamma: 1.0,
            eta: 0.02,
            epsilon_conv: 1e-4 * r,
            alpha_offset: 1.0,
            alpha_standoff: 1.0,
            max_iters: 5000,
            multiplier_updates: false,
            outer_rounds: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidArgument("beta must be non-negative".into()));
        }
        pos(self.rho_b, "rho_b")?;
        pos(self.rho_c, "rho_c")?;
        pos(self.gamma, "gamma")?;
        pos(self.eta, "eta")?;
        pos(self.epsilon_conv, "epsilon_conv")?;
        if !(0.0..=1.0).contains(&self.alpha_offset) {
            return Err(Error::InvalidArgument(format!(
                "alpha_offset must lie in [0, 1], got {}",
                self.alpha_offset
            )));
        }
        if !(self.alpha_standoff >= 1.0 && self.alpha_standoff.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha_standoff must be at least 1, got {}",
                self.alpha_standoff
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Index of the edge whose line is closest on the inside (smallest signed
/// distance); ties go to the lower index.
pub fn nearest_edge(c: Point2, poly: &ConvexPolygon) -> (usize, f64) {
    let mut best = (0, poly.edge_distance(0, c));
    for j in 1..poly.len() {
        let d = poly.edge_distance(j, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Inward correction `sum_j rho_b (r - d_j) n_j` over edges with `d_j < r`;
/// the negative gradient of `rho_b/2 sum_j max(0, r - d_j)^2`.
pub fn normal_gradient(c: Point2, poly: &ConvexPolygon, r: f64, rho_b: f64) -> Vec2 {
    let mut g = Vec2::ORIGIN;
    for (j, &n) in poly.inward_normals().iter().enumerate() {
        let d = poly.edge_distance(j, c);
        if d < r {
            g += n * (rho_b * (r - d));
        }
    }
    g
}

/// `rho_b/2 sum_j max(0, r - d_j(c))^2`.
pub fn boundary_penalty(c: Point2, poly: &ConvexPolygon, r: f64, rho_b: f64) -> f64 {
    (0..poly.len())
        .map(|j| (r - poly.edge_distance(j, c)).max(0.0).powi(2))
        .sum::<f64>()
        * 0.5
        * rho_b
}

/// `(I - n n^T) v` for unit `n`.
pub fn tangential_projection(n: Vec2, v: Vec2) -> Vec2 {
    v - n * n.dot(v)
}

/// Attraction `gamma (b* - c)` towards the nearest encircling point,
/// projected onto the tangent of the nearest edge.
pub fn tangential_gradient(
    c: Point2,
    targets: &BoundaryEncirclingPointSet,
    poly: &ConvexPolygon,
    gamma: f64,
) -> Vec2 {
    if targets.is_empty() {
        return Vec2::ORIGIN;
    }
    let b = targets.nearest(c).position;
    let (k, _) = nearest_edge(c, poly);
    tangential_projection(poly.inward_normal(k), b - c) * gamma
}

/// Separating push `sum_j rho_c (2r - d_ij) u_ij` over overlapping
/// neighbours, `u_ij` the unit vector from `c_j` to `c_i`; the negative
/// gradient of the overlap penalty. Coincident pairs contribute nothing.
pub fn repulsive_gradient(cfg: &CircleConfiguration, i: usize, rho_c: f64) -> Vec2 {
    let r = cfg.radius;
    let ci = cfg.centers[i];
    let mut g = Vec2::ORIGIN;
    for (j, &cj) in cfg.centers.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = ci - cj;
        let dist = d.norm();
        if dist < 2.0 * r && dist > 0.0 {
            g += d * (rho_c * (2.0 * r - dist) / dist);
        }
    }
    g
}

/// `rho_c/2 sum_{i<j} max(0, 2r - |c_i - c_j|)^2`.
pub fn overlap_penalty(cfg: &CircleConfiguration, rho_c: f64) -> f64 {
    let r = cfg.radius;
    let mut s = 0.0;
    for (i, &a) in cfg.centers.iter().enumerate() {
        for &b in &cfg.centers[i + 1..] {
            s += (2.0 * r - a.distance(b)).max(0.0).powi(2);
        }
    }
    0.5 * rho_c * s
}

/// `(1/n) sum_i (min_j d_j(c_i) - alpha r)^2`.
pub fn boundary_distance_term(cfg: &CircleConfiguration, poly: &ConvexPolygon, alpha: f64) -> f64 {
    if cfg.is_empty() {
        return 0.0;
    }
    let target = alpha * cfg.radius;
    cfg.centers
        .iter()
        .map(|&c| (signed_distance(c, poly) - target).powi(2))
        .sum::<f64>()
        / cfg.len() as f64
}

/// Gradient of [`boundary_distance_term`] with respect to `c_i`:
/// `(2/n)(d_k - alpha r) n_k` for the nearest edge `k`.
pub fn boundary_distance_gradient(
    cfg: &CircleConfiguration,
    poly: &ConvexPolygon,
    alpha: f64,
    i: usize,
) -> Vec2 {
    let (k, d) = nearest_edge(cfg.centers[i], poly);
    poly.inward_normal(k) * (2.0 / cfg.len() as f64 * (d - alpha * cfg.radius))
}

/// Nearest point of the polygon to `c` (identity inside).
fn project_into(c: Point2, poly: &ConvexPolygon) -> Point2 {
    if signed_distance(c, poly) >= 0.0 {
        return c;
    }
    let mut best = c;
    let mut best_d = f64::INFINITY;
    for e in poly.edges() {
        let v = e.direction();
        let t = ((c - e.p1()).dot(v) / v.norm_sq()).clamp(0.0, 1.0);
        let q = e.p1() + v * t;
        let d = (q - c).norm_sq();
        if d < best_d {
            best = q;
            best_d = d;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncircleRecord {
    pub iteration: usize,
    pub max_displacement: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncircleOutcome {
    pub config: CircleConfiguration,
    /// Indices of circles that overflowed on entry and were moved.
    pub moved: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<EncircleRecord>,
}

const TRACE_STRIDE: usize = 25;

/// `beta J_boundary` plus both penalties (the coverage term is not
/// differentiated and is left out).
pub fn penalty_objective(cfg: &CircleConfiguration, poly: &ConvexPolygon, p: &LagrangianParams) -> f64 {
    let r = cfg.radius;
    p.beta * boundary_distance_term(cfg, poly, p.alpha_standoff)
        + cfg
            .centers
            .iter()
            .map(|&c| boundary_penalty(c, poly, r, p.rho_b))
            .sum::<f64>()
        + overlap_penalty(cfg, p.rho_c)
}

/// Moves overflowing circles (`min_j d_j < r`) by projected gradient steps
/// `c += eta [normal + tangential + repulsive]` until every step is shorter
/// than `epsilon_conv`. On hitting `max_iters` the lowest-objective iterate is
/// returned with `converged = false`.
pub fn encircle(
    state: &ExpansionSystemState,
    poly: &ConvexPolygon,
    params: &LagrangianParams,
) -> Result<EncircleOutcome> {
    params.validate()?;
    let r = state.radius;
    let n = state.len();
    let mut cfg = CircleConfiguration::new(state.positions.clone(), r)?;
    let moved: Vec<usize> = (0..n)
        .filter(|&i| signed_distance(cfg.centers[i], poly) < r - poly.tolerance())
        .collect();
    if moved.is_empty() {
        return Ok(EncircleOutcome {
            config: cfg,
            moved,
            iterations: 0,
            converged: true,
            trace: Vec::new(),
        });
    }
    separate_coincident(&mut cfg.centers, r);
    let targets = generate_encircling_points(poly, n, r, params.alpha_offset);

    // multipliers: edge terms per (circle, edge), overlap terms per pair
    let mut mu_edge: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut lambda_pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let rounds = if params.multiplier_updates {
        params.outer_rounds.max(1)
    } else {
        1
    };

    let mut best = (penalty_objective(&cfg, poly, params), cfg.clone());
    let mut trace = vec![EncircleRecord {
        iteration: 0,
        max_displacement: 0.0,
        objective: best.0,
    }];
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..rounds {
        converged = false;
        while iterations < params.max_iters {
            iterations += 1;
            let steps = par::map_slice(&moved, |&i| {
                let c = cfg.centers[i];
                let mut g = normal_gradient(c, poly, r, params.rho_b)
                    + tangential_gradient(c, &targets, poly, params.gamma)
                    + repulsive_gradient(&cfg, i, params.rho_c);
                for (j, &nrm) in poly.inward_normals().iter().enumerate() {
                    if let Some(&m) = mu_edge.get(&(i, j)) {
                        if poly.edge_distance(j, c) < r {
                            g += nrm * m;
                        }
                    }
                }
                for (k, &ck) in cfg.centers.iter().enumerate() {
                    if let Some(&l) = lambda_pair.get(&(i.min(k), i.max(k))) {
                        let d = c - ck;
                        let dist = d.norm();
                        if k != i && dist < 2.0 * r && dist > 0.0 {
                            g += d * (l / dist);
                        }
                    }
                }
                let next = project_into(c + g * params.eta, poly);
                (next, (next - c).norm())
            });
            let mut max_disp: f64 = 0.0;
            for (&i, &(next, disp)) in moved.iter().zip(&steps) {
                cfg.centers[i] = next;
                max_disp = max_disp.max(disp);
            }
            separate_coincident(&mut cfg.centers, r);
            let objective = penalty_objective(&cfg, poly, params);
            if objective <= best.0 {
                best = (objective, cfg.clone());
            }
            let done = max_disp < params.epsilon_conv;
            if done || iterations % TRACE_STRIDE == 0 {
                trace.push(EncircleRecord {
                    iteration: iterations,
                    max_displacement: max_disp,
                    objective,
                });
            }
            if done {
                converged = true;
                break;
            }
        }
        if !converged || !params.multiplier_updates {
            break;
        }
        let mut violated = false;
        for &i in &moved {
            let c = cfg.centers[i];
            for j in 0..poly.len() {
                let g = r - poly.edge_distance(j, c);
                if g > params.epsilon_conv {
                    *mu_edge.entry((i, j)).or_insert(0.0) += params.rho_b * g;
                    violated = true;
                }
            }
            for (k, &ck) in cfg.centers.iter().enumerate() {
                let h = 2.0 * r - c.distance(ck);
                if k != i && h > params.epsilon_conv {
                    *lambda_pair.entry((i.min(k), i.max(k))).or_insert(0.0) += params.rho_c * h;
                    violated = true;
                }
            }
        }
        if !violated {
            break;
        }
    }
    let config = if converged { cfg } else { best.1 };
    Ok(EncircleOutcome {
        config,
        moved,
        iterations,
        converged,
        trace,
    })
}
