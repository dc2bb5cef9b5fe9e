//! Voronoi cells clipped to a convex domain by successive half-plane cuts.

use super::{ConvexPolygon, Point2};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiCell {
    pub generator_index: usize,
    pub polygon: ConvexPolygon,
}

/// Clips a convex vertex loop to the closed half-plane of points at least as
/// close to `own` as to `other`.
pub fn clip_cell(cell: &[Point2], own: Point2, other: Point2) -> Vec<Point2> {
    let mid = (own + other) * 0.5;
    let normal = other - own;
    let side = |p: Point2| (p - mid).dot(normal);
    let n = cell.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = cell[i];
        let b = cell[(i + 1) % n];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

fn shoelace(v: &[Point2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    ((0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5).abs()
}

fn raw_cell(i: usize, centers: &[Point2], poly: &ConvexPolygon) -> Vec<Point2> {
    let own = centers[i];
    let mut cell = poly.vertices().to_vec();
    for (j, &other) in centers.iter().enumerate() {
        if j == i || other == own {
            continue;
        }
        cell = clip_cell(&cell, own, other);
        if cell.is_empty() {
            break;
        }
    }
    cell
}

/// Clipped Voronoi diagram of `centers` inside `poly`, one cell per generator
/// in input order.
pub fn clipped_voronoi(centers: &[Point2], poly: &ConvexPolygon) -> Result<Vec<VoronoiCell>> {
    let tol = 1e-12 * poly.diameter();
    for (i, &c) in centers.iter().enumerate() {
        if super::signed_distance(c, poly) <= 0.0 {
            return Err(Error::DegenerateInput(format!("generator {i} is not inside the polygon")));
        }
        if let Some(j) = centers[..i].iter().position(|&o| o.distance(c) <= tol) {
            return Err(Error::DegenerateInput(format!("generators {j} and {i} coincide")));
        }
    }
    par::map_indexed(centers.len(), |i| {
        let cell = raw_cell(i, centers, poly);
        let polygon = ConvexPolygon::new(cell).map_err(|_| {
            Error::DegenerateInput(format!("cell of generator {i} is degenerate"))
        })?;
        Ok(VoronoiCell {
            generator_index: i,
            polygon,
        })
    })
    .into_iter()
    .collect()
}

/// Cell areas without the generator preconditions: exterior generators may
/// get empty cells and exact duplicates share a cell.
pub(crate) fn cell_areas(centers: &[Point2], poly: &ConvexPolygon) -> Vec<f64> {
    par::map_indexed(centers.len(), |i| shoelace(&raw_cell(i, centers, poly)))
}
