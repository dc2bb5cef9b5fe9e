//! Run configuration files and polygon generators.
//!
//! A config is TOML (or JSON when the file ends in `.json`). Unknown fields
//! are rejected. Parameters left out take the radius-scaled defaults of each
//! stage. One global `seed` drives every random choice through
//! [`derive_seed`].

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::LagrangianParams;
use crate::dynamics::DynamicsParams;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon, EstimatorMethod, EstimatorParams, Point2};
use crate::init::InitParams;

/// Stream labels for [`derive_seed`].
pub const SEED_ESTIMATOR: u64 = 1;
pub const SEED_INIT: u64 = 2;

/// SplitMix64 finalizer applied to `seed + stage * golden`; distinct stages
/// get decorrelated seeds from one global seed.
pub fn derive_seed(seed: u64, stage: u64) -> u64 {
    let mut z = seed.wrapping_add(stage.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Axis-aligned, centred on the origin.
    Rectangle { width: f64, height: f64 },
    /// Centred on the origin with a vertex on the +y axis.
    RegularNgon { sides: usize, circumradius: f64 },
    /// Hull of `point_count` uniform points in `[-size/2, size/2]^2`.
    RandomConvex {
        point_count: usize,
        seed: u64,
        #[serde(default = "default_random_size")]
        size: f64,
    },
    Vertices { points: Vec<[f64; 2]> },
}

fn default_random_size() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    pub shape: Shape,
    /// Counter-clockwise rotation about the origin, radians.
    #[serde(default)]
    pub rotation: f64,
    #[serde(default)]
    pub translation: [f64; 2],
}

impl PolygonSpec {
    pub fn new(shape: Shape) -> Self {
        PolygonSpec {
            shape,
            rotation: 0.0,
            translation: [0.0, 0.0],
        }
    }

    /// Parses the compact forms `rectangle:W,H`, `ngon:K,R` and
    /// `random:COUNT,SEED[,SIZE]`.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("expected KIND:ARGS, got {s:?}")))?;
        let nums: Vec<&str> = args.split(',').map(str::trim).collect();
        let f = |i: usize| -> Result<f64> {
            nums.get(i)
                .ok_or_else(|| Error::Config(format!("missing argument {} in {s:?}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad number in {s:?}: {e}")))
        };
        let u = |i: usize| -> Result<u64> {
            nums.get(i)
                .ok_or_else(|| Error::Config(format!("missing argument {} in {s:?}", i + 1)))?
                .parse::<u64>()
                .map_err(|e| Error::Config(format!("bad integer in {s:?}: {e}")))
        };
        let shape = match kind {
            "rectangle" => Shape::Rectangle {
                width: f(0)?,
                height: f(1)?,
            },
            "ngon" | "regular_ngon" => Shape::RegularNgon {
                sides: u(0)? as usize,
                circumradius: f(1)?,
            },
            "random" | "random_convex" => Shape::RandomConvex {
                point_count: u(0)? as usize,
                seed: u(1)?,
                size: if nums.len() > 2 { f(2)? } else { default_random_size() },
            },
            other => return Err(Error::Config(format!("unknown polygon kind {other:?}"))),
        };
        Ok(PolygonSpec::new(shape))
    }
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

/// Builds the polygon described by `spec`. Deterministic for a fixed seed.
pub fn generate_polygon(spec: &PolygonSpec) -> Result<ConvexPolygon> {
    let base = match &spec.shape {
        Shape::Rectangle { width, height } => {
            positive(*width, "width")?;
            positive(*height, "height")?;
            let (w, h) = (width * 0.5, height * 0.5);
            ConvexPolygon::new(vec![
                Point2::new(-w, -h),
                Point2::new(w, -h),
                Point2::new(w, h),
                Point2::new(-w, h),
            ])?
        }
        Shape::RegularNgon {
            sides,
            circumradius,
        } => {
            if *sides < 3 {
                return Err(Error::InvalidArgument(format!("a polygon needs 3 sides, got {sides}")));
            }
            positive(*circumradius, "circumradius")?;
            let verts = (0..*sides)
                .map(|k| {
                    let a = std::f64::consts::FRAC_PI_2
                        + std::f64::consts::TAU * k as f64 / *sides as f64;
                    Point2::from_angle(a) * *circumradius
                })
                .collect();
            ConvexPolygon::new(verts)?
        }
        Shape::RandomConvex {
            point_count,
            seed,
            size,
        } => {
            positive(*size, "size")?;
            let pts = random_points(*point_count, *seed, *size);
            convex_hull(&pts)?
        }
        Shape::Vertices { points } => {
            ConvexPolygon::new(points.iter().map(|&[x, y]| Point2::new(x, y)).collect())?
        }
    };
    let [tx, ty] = spec.translation;
    if spec.rotation == 0.0 && tx == 0.0 && ty == 0.0 {
        return Ok(base);
    }
    Ok(base.transformed(spec.rotation, Point2::ORIGIN, Point2::new(tx, ty)))
}

/// The seeded points behind a `random_convex` shape.
pub fn random_points(count: usize, seed: u64, size: f64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = size * 0.5;
    (0..count)
        .map(|_| Point2::new(rng.gen_range(-h..h), rng.gen_range(-h..h)))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub alpha_safety: Option<f64>,
    pub alpha_inset: Option<f64>,
    pub corner_insertion: Option<bool>,
    pub overlap_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub mu: Option<f64>,
    pub dt: Option<f64>,
    pub max_relax_steps: Option<usize>,
    pub velocity_epsilon: Option<f64>,
    pub alpha_inflate: Option<f64>,
    pub epsilon_inflate: Option<f64>,
    pub u_th: Option<f64>,
    pub c_th: Option<usize>,
    pub max_rounds: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub beta: Option<f64>,
    pub rho_b: Option<f64>,
    pub rho_c: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub epsilon_conv: Option<f64>,
    pub alpha_offset: Option<f64>,
    pub alpha_standoff: Option<f64>,
    pub max_iters: Option<usize>,
    pub multiplier_updates: Option<bool>,
    pub outer_rounds: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub method: Option<EstimatorMethod>,
    pub samples: Option<usize>,
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub polygon: PolygonSpec,
    pub n: usize,
    pub r: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub init: InitConfig,
    #[serde(default)]
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $( if let Some(v) = $src.$field { $dst.$field = v; } )+
    };
}

impl RunConfig {
    pub fn new(polygon: PolygonSpec, n: usize, r: f64) -> Self {
        RunConfig {
            polygon,
            n,
            r,
            seed: 0,
            init: InitConfig::default(),
            dynamics: DynamicsConfig::default(),
            boundary: BoundaryConfig::default(),
            estimator: EstimatorConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; `.json` files are JSON, everything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    /// Initialization parameters at radius `r` (the pipeline starts at a
    /// fraction of the target).
    pub fn init_params(&self, r: f64) -> InitParams {
        let mut p = InitParams::new(self.n, r);
        p.seed = derive_seed(self.seed, SEED_INIT);
        overlay!(p, self.init, alpha_safety, alpha_inset, corner_insertion, overlap_tolerance);
        p
    }

    pub fn dynamics_params(&self) -> DynamicsParams {
        let mut p = DynamicsParams::for_radius(self.r);
        let d = &self.dynamics;
        overlay!(p, d, mu, dt, max_relax_steps, velocity_epsilon, alpha_inflate, epsilon_inflate, u_th, c_th);
        if d.max_rounds.is_some() {
            p.max_rounds = d.max_rounds;
        }
        p
    }

    pub fn lagrangian_params(&self) -> LagrangianParams {
        let mut p = LagrangianParams::for_radius(self.r);
        let b = &self.boundary;
        overlay!(
            p, b, beta, rho_b, rho_c, gamma, eta, epsilon_conv, alpha_offset, alpha_standoff,
            max_iters, multiplier_updates, outer_rounds
        );
        p
    }

    pub fn estimator_params(&self) -> EstimatorParams {
        let mut p = EstimatorParams {
            seed: derive_seed(self.seed, SEED_ESTIMATOR),
            ..EstimatorParams::default()
        };
        overlay!(p, self.estimator, method, samples, resolution);
        p
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        positive(self.r, "r")?;
        generate_polygon(&self.polygon)?;
        self.init_params(0.1 * self.r).validate()?;
        self.dynamics_params().validate()?;
        self.lagrangian_params().validate()?;
        let e = self.estimator_params();
        match e.method {
            EstimatorMethod::MonteCarlo if e.samples == 0 => {
                Err(Error::InvalidArgument("estimator samples must be positive".into()))
            }
            EstimatorMethod::Grid if e.resolution == 0 => {
                Err(Error::InvalidArgument("estimator resolution must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}
