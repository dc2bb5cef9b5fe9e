//! Coverage of a convex polygon by `n` congruent circles.
//!
//! The pipeline has three stages:
//!
//! 1. [`init`]: a hexagonal close-packed lattice is rotated onto the
//!    polygon's principal axis, scaled into its minimum bounding rectangle,
//!    centred, filtered, and completed with corner insertions.
//! 2. [`dynamics`]: circles are inflated from a tenth of the target radius,
//!    with damped quasi-physical relaxation after each step. Overlap areas
//!    act as elastic forces and the step size adapts to the usage rate.
//! 3. [`boundary`]: circles still overflowing an edge are pulled back by
//!    projected gradient descent on a penalized objective, sliding along the
//!    boundary towards evenly spaced target points.
//!
//! [`metrics`] scores the result and [`pipeline`] runs everything from a
//! [`config::RunConfig`].

pub mod boundary;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod init;
pub mod metrics;
mod par;
pub mod pipeline;
pub mod svg;

pub use error::{Error, Result, Stage};
pub use geometry::{CircleConfiguration, ConvexPolygon, Point2, Vec2};
