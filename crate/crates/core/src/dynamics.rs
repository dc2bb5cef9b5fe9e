//! Damped quasi-physical relaxation and adaptive radius inflation.
//!
//! Each circle is a unit-mass particle. Overlap areas act as elastic forces:
//! the lens shared with another circle pushes along the line of centers, and
//! the part of the disc beyond an edge line pushes along that edge's inward
//! normal. A viscous term `-mu v` removes energy. Integration is explicit
//! Euler with the position update using the pre-update velocity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lens_area_unchecked;
use crate::geometry::{overflow_area, CircleConfiguration, ConvexPolygon, Point2, SampleSet, Vec2};
use crate::par;

const PARALLEL_MIN: usize = 64;

/// Positions, velocities and last total forces at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionSystemState {
    pub positions: Vec<Point2>,
    pub velocities: Vec<Vec2>,
    pub forces: Vec<Vec2>,
    pub radius: f64,
}

impl ExpansionSystemState {
    /// State at rest at the configuration's centers.
    pub fn at_rest(cfg: &CircleConfiguration) -> Self {
        let n = cfg.len();
        ExpansionSystemState {
            positions: cfg.centers.clone(),
            velocities: vec![Vec2::ORIGIN; n],
            forces: vec![Vec2::ORIGIN; n],
            radius: cfg.radius,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn config(&self) -> CircleConfiguration {
        CircleConfiguration {
            centers: self.positions.clone(),
            radius: self.radius,
        }
    }

    pub fn max_speed(&self) -> f64 {
        self.velocities.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Total kinetic energy with unit masses.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.velocities.iter().map(|v| v.norm_sq()).sum::<f64>()
    }

    fn validate(&self) -> Result<()> {
        let n = self.positions.len();
        if self.velocities.len() != n || self.forces.len() != n {
            return Err(Error::InvalidArgument("state vectors differ in length".into()));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.radius)));
        }
        let finite = self
            .positions
            .iter()
            .chain(&self.velocities)
            .chain(&self.forces)
            .all(|p| p.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("state has non-finite entries".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    /// Viscous damping coefficient.
    pub mu: f64,
    pub dt: f64,
    pub max_relax_steps: usize,
    /// Equilibrium: every speed and net elastic force below this (forces
    /// compared after dividing by `mu`).
    pub velocity_epsilon: f64,
    pub r_target: f64,
    /// Initial inflation step as a fraction of `r_target`.
    pub alpha_inflate: f64,
    /// Inflation stops once the step falls to this size.
    pub epsilon_inflate: f64,
    /// Usage-rate threshold for accepting a larger radius.
    pub u_th: f64,
    /// Consecutive accepts before the step doubles.
    pub c_th: usize,
    /// Hard cap on inflation rounds; `None` means `ceil(10 log2(r_target / epsilon_inflate))`.
    pub max_rounds: Option<usize>,
}

impl DynamicsParams {
    /// Defaults scaled to the target radius. Forces scale with `r^2` and
    /// stiffness with `r`, so `dt ~ 1/r` and speeds `~ r^2` keep the motion
    /// per step a fixed fraction of `r`.
    pub fn for_radius(r_target: f64) -> Self {
        DynamicsParams {
            mu: 0.8,
            dt: 0.04 / r_target,
            max_relax_steps: 2000,
            velocity_epsilon: 1e-5 * r_target * r_target,
            r_target,
            alpha_inflate: 0.1,
            epsilon_inflate: 1e-3 * r_target,
            u_th: 0.90,
            c_th: 3,
            max_rounds: None,
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
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu must be non-negative, got {}", self.mu)));
        }
        pos(self.dt, "dt")?;
        pos(self.velocity_epsilon, "velocity_epsilon")?;
        pos(self.r_target, "r_target")?;
        pos(self.alpha_inflate, "alpha_inflate")?;
        pos(self.epsilon_inflate, "epsilon_inflate")?;
        if !(self.u_th > 0.0 && self.u_th <= 1.0) {
            return Err(Error::InvalidArgument(format!("u_th must lie in (0, 1], got {}", self.u_th)));
        }
        if self.c_th < 1 {
            return Err(Error::InvalidArgument("c_th must be at least 1".into()));
        }
        if self.max_relax_steps < 1 {
            return Err(Error::InvalidArgument("max_relax_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn round_cap(&self) -> usize {
        self.max_rounds.unwrap_or_else(|| {
            (10.0 * (self.r_target / self.epsilon_inflate).log2()).ceil().max(1.0) as usize
        })
    }
}

/// Circle-circle elastic forces on circle `i`: lens area along the line of
/// centers. Fails on coincident centers.
pub fn circle_forces(positions: &[Point2], r: f64, i: usize) -> Result<Vec2> {
    let ci = positions[i];
    let mut f = Vec2::ORIGIN;
    let reach2 = 4.0 * r * r;
    for (j, &cj) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = ci - cj;
        let d2 = d.norm_sq();
        if d2 >= reach2 {
            continue;
        }
        let dist = d2.sqrt();
        if dist < 1e-12 * r {
            return Err(Error::CoincidentCenters { i: i.min(j), j: i.max(j) });
        }
        f += d * (lens_area_unchecked(dist, r) / dist);
    }
    Ok(f)
}

/// Boundary forces on a circle at `c`: for each edge whose line cuts the
/// disc, the cut-off area along the edge's inward normal.
pub fn boundary_forces(poly: &ConvexPolygon, c: Point2, r: f64) -> Vec2 {
    let mut f = Vec2::ORIGIN;
    for (k, &n) in poly.inward_normals().iter().enumerate() {
        let d = poly.edge_distance(k, c);
        if d < r {
            f += n * overflow_area(d, r);
        }
    }
    f
}

/// Elastic forces on circle `i` (no damping).
pub fn elastic_force(state: &ExpansionSystemState, poly: &ConvexPolygon, i: usize) -> Result<Vec2> {
    Ok(circle_forces(&state.positions, state.radius, i)?
        + boundary_forces(poly, state.positions[i], state.radius))
}

/// Elastic forces plus viscous damping `-mu v_i`.
pub fn total_force(
    state: &ExpansionSystemState,
    poly: &ConvexPolygon,
    i: usize,
    mu: f64,
) -> Result<Vec2> {
    if i >= state.len() {
        return Err(Error::InvalidArgument(format!("index {i} out of range")));
    }
    Ok(elastic_force(state, poly, i)? - state.velocities[i] * mu)
}

/// Moves the higher-indexed member of each coincident pair by `1e-6 r` at
/// angle `2 pi i / n`. Returns how many circles moved.
pub fn separate_coincident(positions: &mut [Point2], r: f64) -> usize {
    let n = positions.len();
    let tol2 = (1e-12 * r) * (1e-12 * r);
    let mut moved = 0;
    for i in 1..n {
        let hit = (0..i).any(|j| (positions[i] - positions[j]).norm_sq() < tol2);
        if hit {
            let angle = std::f64::consts::TAU * i as f64 / n as f64;
            positions[i] += Point2::from_angle(angle) * (1e-6 * r);
            moved += 1;
        }
    }
    moved
}

fn all_elastic(state: &ExpansionSystemState, poly: &ConvexPolygon) -> Result<Vec<Vec2>> {
    par::map_indexed_min(state.len(), PARALLEL_MIN, |i| elastic_force(state, poly, i))
        .into_iter()
        .collect()
}

/// One explicit Euler step: `a = F`, `v += a dt`, `x += v_old dt`.
pub fn integrate_step(
    state: &ExpansionSystemState,
    poly: &ConvexPolygon,
    params: &DynamicsParams,
) -> Result<ExpansionSystemState> {
    state.validate()?;
    let mut cur = state.clone();
    separate_coincident(&mut cur.positions, cur.radius);
    let elastic = all_elastic(&cur, poly)?;
    step_with(cur, &elastic, poly, params)
}

fn step_with(
    mut cur: ExpansionSystemState,
    elastic: &[Vec2],
    poly: &ConvexPolygon,
    params: &DynamicsParams,
) -> Result<ExpansionSystemState> {
    let limit = poly.diameter() / params.dt;
    for i in 0..cur.len() {
        let v_old = cur.velocities[i];
        let f = elastic[i] - v_old * params.mu;
        let v_new = v_old + f * params.dt;
        let speed = v_new.norm();
        if !(speed <= limit) {
            return Err(Error::NumericalBlowup { speed, limit });
        }
        cur.forces[i] = f;
        cur.velocities[i] = v_new;
        cur.positions[i] += v_old * params.dt;
    }
    Ok(cur)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxOutcome {
    pub state: ExpansionSystemState,
    pub steps: usize,
    pub equilibrium: bool,
}

/// Integrates until every speed is below `velocity_epsilon` and every net
/// elastic force below `mu * velocity_epsilon`, or `max_relax_steps` steps.
pub fn relax(
    state: &ExpansionSystemState,
    poly: &ConvexPolygon,
    params: &DynamicsParams,
) -> Result<RelaxOutcome> {
    state.validate()?;
    params.validate()?;
    let eps = params.velocity_epsilon;
    let force_eps = params.mu.max(1e-12) * eps;
    let mut cur = state.clone();
    let mut steps = 0;
    loop {
        separate_coincident(&mut cur.positions, cur.radius);
        let elastic = all_elastic(&cur, poly)?;
        let settled = cur.max_speed() < eps
            && elastic.iter().all(|f| f.norm() < force_eps);
        if settled || steps >= params.max_relax_steps {
            return Ok(RelaxOutcome {
                state: cur,
                steps,
                equilibrium: settled,
            });
        }
        cur = step_with(cur, &elastic, poly, params)?;
        steps += 1;
    }
}

/// Usage rate `A_cover / (n pi r^2)` on a fixed sample set, in `[0, 1]`.
pub fn usage_rate(state: &ExpansionSystemState, samples: &SampleSet) -> f64 {
    let cfg = state.config();
    if cfg.is_empty() {
        return 0.0;
    }
    (samples.covered_area(&cfg) / cfg.total_disc_area()).clamp(0.0, 1.0)
}

/// Adaptive inflation step. Accepting bumps a success counter; once it reaches
/// `c_th` the step doubles (capped at `r_target`) and the counter resets.
/// Rejecting halves the step and resets the counter.
#[derive(Debug, Clone, PartialEq)]
pub struct InflationController {
    pub radius: f64,
    pub step: f64,
    pub successes: usize,
    r_target: f64,
    epsilon: f64,
    c_th: usize,
}

impl InflationController {
    pub fn new(r_start: f64, params: &DynamicsParams) -> Self {
        InflationController {
            radius: r_start,
            step: (params.alpha_inflate * params.r_target).min(params.r_target),
            successes: 0,
            r_target: params.r_target,
            epsilon: params.epsilon_inflate,
            c_th: params.c_th,
        }
    }

    /// Next radius to try, or `None` when the step has shrunk to `epsilon`
    /// or the target radius is reached.
    pub fn proposal(&self) -> Option<f64> {
        if self.step <= self.epsilon || self.radius >= self.r_target {
            None
        } else {
            Some((self.radius + self.step).min(self.r_target))
        }
    }

    pub fn record(&mut self, tried: f64, accepted: bool) {
        if accepted {
            self.radius = tried;
            self.successes += 1;
            if self.successes >= self.c_th {
                self.step = (self.step * 2.0).min(self.r_target);
                self.successes = 0;
            }
        } else {
            self.step *= 0.5;
            self.successes = 0;
        }
    }
}

/// One inflation attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub radius: f64,
    pub usage_rate: f64,
    pub max_velocity: f64,
    pub steps: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionOutcome {
    /// Relaxed state at exactly `r_target`.
    pub state: ExpansionSystemState,
    /// Largest radius accepted by the inflation loop.
    pub inflated_radius: f64,
    pub rounds: usize,
    pub trace: Vec<ExpansionRecord>,
    /// Whether the final relaxation at `r_target` reached equilibrium.
    pub equilibrium: bool,
    /// Set only by [`expand_radii_capped`] when the loop was cut short.
    pub hit_round_cap: bool,
}

/// Inflation loop: try `r + dr`, relax, accept when the usage rate exceeds
/// `u_th`. Afterwards the radius is set to `r_target` and relaxed once more.
pub fn expand_radii(
    poly: &ConvexPolygon,
    params: &DynamicsParams,
    init: &CircleConfiguration,
    samples: &SampleSet,
) -> Result<ExpansionOutcome> {
    expand_radii_with(poly, params, init, |s| usage_rate(s, samples))
}

/// [`expand_radii`] with a caller-supplied usage measure.
pub fn expand_radii_with<U>(
    poly: &ConvexPolygon,
    params: &DynamicsParams,
    init: &CircleConfiguration,
    usage: U,
) -> Result<ExpansionOutcome>
where
    U: FnMut(&ExpansionSystemState) -> f64,
{
    expand_inner(poly, params, init, usage, true)
}

/// Like [`expand_radii`], but hitting the round cap stops the loop, relaxes
/// at `r_target` as usual and sets `hit_round_cap` instead of failing.
pub fn expand_radii_capped(
    poly: &ConvexPolygon,
    params: &DynamicsParams,
    init: &CircleConfiguration,
    samples: &SampleSet,
) -> Result<ExpansionOutcome> {
    expand_inner(poly, params, init, |s| usage_rate(s, samples), false)
}

fn expand_inner<U>(
    poly: &ConvexPolygon,
    params: &DynamicsParams,
    init: &CircleConfiguration,
    mut usage: U,
    strict: bool,
) -> Result<ExpansionOutcome>
where
    U: FnMut(&ExpansionSystemState) -> f64,
{
    params.validate()?;
    if init.is_empty() {
        return Err(Error::InvalidArgument("no circles to inflate".into()));
    }
    let mut state = ExpansionSystemState::at_rest(init);
    let mut ctl = InflationController::new(init.radius.min(params.r_target), params);
    let cap = params.round_cap();
    let mut trace = Vec::new();
    let mut rounds = 0;
    let mut hit_round_cap = false;
    while let Some(r_test) = ctl.proposal() {
        if rounds >= cap {
            if strict {
                return Err(Error::NonConvergence { iterations: rounds });
            }
            hit_round_cap = true;
            break;
        }
        rounds += 1;
        let mut test = state.clone();
        test.radius = r_test;
        let relaxed = relax(&test, poly, params)?;
        let u = usage(&relaxed.state);
        let accepted = u > params.u_th;
        trace.push(ExpansionRecord {
            radius: r_test,
            usage_rate: u,
            max_velocity: relaxed.state.max_speed(),
            steps: relaxed.steps,
            accepted,
        });
        ctl.record(r_test, accepted);
        if accepted {
            state = relaxed.state;
        }
    }
    let inflated_radius = ctl.radius;
    state.radius = params.r_target;
    let fin = relax(&state, poly, params)?;
    trace.push(ExpansionRecord {
        radius: params.r_target,
        usage_rate: usage(&fin.state),
        max_velocity: fin.state.max_speed(),
        steps: fin.steps,
        accepted: true,
    });
    Ok(ExpansionOutcome {
        state: fin.state,
        inflated_radius,
        rounds,
        trace,
        equilibrium: fin.equilibrium,
        hit_round_cap,
    })
}
