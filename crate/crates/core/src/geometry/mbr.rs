//! Minimum-area bounding rectangle by rotating calipers.

use std::f64::consts::PI;

use super::{ConvexPolygon, Point2, Vec2};

/// Rectangle with an arbitrary orientation. `corners[0] -> corners[1]` is a
/// long side and runs along `direction`; corners are clockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRectangle {
    pub corners: [Point2; 4],
    /// Unit vector along the long side, with `angle` in `[0, pi)`.
    pub direction: Vec2,
    pub angle: f64,
    pub width: f64,
    pub height: f64,
}

impl OrientedRectangle {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn center(&self) -> Point2 {
        (self.corners[0] + self.corners[2]) * 0.5
    }

    /// Builds the rectangle spanning `[u_lo, u_hi]` along unit `u` and
    /// `[v_lo, v_hi]` along `v = right_perp(u)`.
    fn from_extents(u: Vec2, u_lo: f64, u_hi: f64, v_lo: f64, v_hi: f64) -> Self {
        let v = u.right_perp();
        let at = |a: f64, b: f64| u * a + v * b;
        let angle = u.y.atan2(u.x);
        OrientedRectangle {
            corners: [at(u_lo, v_lo), at(u_hi, v_lo), at(u_hi, v_hi), at(u_lo, v_hi)],
            direction: u,
            angle,
            width: u_hi - u_lo,
            height: v_hi - v_lo,
        }
    }
}

/// Maps `d` to the equivalent axis `±d` whose angle lies in `[0, pi)`.
fn canonical_axis(d: Vec2) -> (Vec2, f64) {
    let mut a = d.y.atan2(d.x);
    let mut d = d;
    if a < 0.0 {
        a += PI;
        d = -d;
    }
    if a >= PI {
        a -= PI;
        d = -d;
    }
    (d, a)
}

fn extents(poly: &ConvexPolygon, u: Vec2) -> (f64, f64, f64, f64) {
    let v = u.right_perp();
    let mut ext = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &p in poly.vertices() {
        let a = p.dot(u);
        let b = p.dot(v);
        ext.0 = ext.0.min(a);
        ext.1 = ext.1.max(a);
        ext.2 = ext.2.min(b);
        ext.3 = ext.3.max(b);
    }
    ext
}

/// Smallest-area rectangle containing `poly`. One side is flush with a
/// polygon edge. Ties keep the lowest edge index; for a square result the
/// side with the smaller angle becomes the long side.
pub fn minimum_bounding_rectangle(poly: &ConvexPolygon) -> OrientedRectangle {
    let n = poly.len();
    let verts = poly.vertices();
    let dir = |j: usize| {
        let e = poly.vertex(j + 1) - poly.vertex(j);
        e * (1.0 / e.norm())
    };
    let proj = |k: usize, u: Vec2| verts[k % n].dot(u);

    // calipers: vertex indices extreme along +u, -u and the inward normal
    let u0 = dir(0);
    let nrm0 = poly.inward_normal(0);
    let argmax = |f: &dyn Fn(usize) -> f64| {
        (0..n).fold(0, |best, k| if f(k) > f(best) { k } else { best })
    };
    let mut i_max = argmax(&|k| proj(k, u0));
    let mut i_min = argmax(&|k| -proj(k, u0));
    let mut i_far = argmax(&|k| proj(k, nrm0));

    let mut best: Option<(f64, usize)> = None;
    for j in 0..n {
        let u = dir(j);
        let nrm = poly.inward_normal(j);
        for _ in 0..n {
            if proj(i_max + 1, u) >= proj(i_max, u) {
                i_max = (i_max + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if -proj(i_min + 1, u) >= -proj(i_min, u) {
                i_min = (i_min + 1) % n;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if proj(i_far + 1, nrm) >= proj(i_far, nrm) {
                i_far = (i_far + 1) % n;
            } else {
                break;
            }
        }
        let base = verts[j].dot(nrm);
        let w = proj(i_max, u) - proj(i_min, u);
        let h = proj(i_far, nrm) - base;
        let area = w * h;
        let better = match best {
            None => true,
            Some((a, _)) => area < a * (1.0 - 1e-12),
        };
        if better {
            best = Some((area, j));
        }
    }
    let (_, j) = best.expect("polygon has edges");

    let u = dir(j);
    let (w, h) = {
        let e = extents(poly, u);
        (e.1 - e.0, e.3 - e.2)
    };
    let tol = 1e-9 * w.max(h);
    let along_u = canonical_axis(u);
    let along_v = canonical_axis(u.right_perp());
    let axis = if (w - h).abs() <= tol {
        if along_u.1 <= along_v.1 {
            along_u
        } else {
            along_v
        }
    } else if w > h {
        along_u
    } else {
        along_v
    };
    let d = axis.0;
    let (a_lo, a_hi, b_lo, b_hi) = extents(poly, d);
    let mut rect = OrientedRectangle::from_extents(d, a_lo, a_hi, b_lo, b_hi);
    rect.angle = axis.1;
    rect
}
