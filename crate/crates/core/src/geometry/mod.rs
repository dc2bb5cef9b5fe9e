//! Planar primitives, convex polygons, overlap-area kernels, covered-area
//! estimation and clipped Voronoi cells.

mod estimate;
mod kernels;
mod mbr;
mod polygon;
mod voronoi;

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use estimate::{covered_area, EstimatorMethod, EstimatorParams, SampleSet};
pub use kernels::{halfplane_cut_area, lens_area, overflow_area};
pub use mbr::{minimum_bounding_rectangle, OrientedRectangle};
pub use polygon::{
    convex_hull, euclidean_boundary_distance, is_convex, right_distance, signed_distance,
    ConvexPolygon,
};
pub use voronoi::{clip_cell, clipped_voronoi, VoronoiCell};
pub(crate) use kernels::lens_area_unchecked;
pub(crate) use voronoi::cell_areas;

/// A point (or displacement) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// Free vectors share the point representation.
pub type Vec2 = Point2;

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at angle `theta` (radians) from the +x axis.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2::new(c, s)
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Right-hand perpendicular `(y, -x)`.
    #[inline]
    pub fn right_perp(self) -> Vec2 {
        Point2::new(self.y, -self.x)
    }

    /// Counter-clockwise rotation by `theta` radians about the origin.
    pub fn rotated(self, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Point2 {
    #[inline]
    fn sub_assign(&mut self, o: Point2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// Directed segment `p1 -> p2` with `p1 != p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedSegment {
    p1: Point2,
    p2: Point2,
}

impl DirectedSegment {
    pub fn new(p1: Point2, p2: Point2) -> Result<Self> {
        if !(p1.is_finite() && p2.is_finite()) {
            return Err(Error::InvalidArgument("non-finite segment endpoint".into()));
        }
        if p1 == p2 {
            return Err(Error::DegenerateInput("segment endpoints coincide".into()));
        }
        Ok(DirectedSegment { p1, p2 })
    }

    pub fn p1(&self) -> Point2 {
        self.p1
    }

    pub fn p2(&self) -> Point2 {
        self.p2
    }

    pub fn direction(&self) -> Vec2 {
        self.p2 - self.p1
    }

    pub fn length(&self) -> f64 {
        self.direction().norm()
    }

    /// Unit normal pointing to the right of the direction of travel.
    pub fn right_normal(&self) -> Vec2 {
        let v = self.direction();
        v.right_perp() * (1.0 / v.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(Circle { center, radius })
    }

    pub fn contains(&self, p: Point2) -> bool {
        (p - self.center).norm_sq() <= self.radius * self.radius
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Centers of `n` congruent circles sharing one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleConfiguration {
    pub centers: Vec<Point2>,
    pub radius: f64,
}

impl CircleConfiguration {
    pub fn new(centers: Vec<Point2>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        if let Some(i) = centers.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("center {i} is not finite")));
        }
        Ok(CircleConfiguration { centers, radius })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn circles(&self) -> impl Iterator<Item = Circle> + '_ {
        self.centers.iter().map(move |&center| Circle {
            center,
            radius: self.radius,
        })
    }

    /// Same centers at another radius.
    pub fn with_radius(&self, radius: f64) -> CircleConfiguration {
        CircleConfiguration {
            centers: self.centers.clone(),
            radius,
        }
    }

    /// Sum of individual disc areas, `n * pi * r^2`.
    pub fn total_disc_area(&self) -> f64 {
        self.len() as f64 * std::f64::consts::PI * self.radius * self.radius
    }

    /// Flattened `[x1, y1, x2, y2, ...]` vector.
    pub fn to_flat(&self) -> Vec<f64> {
        self.centers.iter().flat_map(|c| [c.x, c.y]).collect()
    }
}
