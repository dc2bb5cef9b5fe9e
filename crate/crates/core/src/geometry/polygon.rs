use serde::{Serialize, Serializer};

use super::{DirectedSegment, Point2, Vec2};
use crate::error::{Error, Result};

/// Relative tolerance for geometric predicates; scaled by polygon diameter.
pub(crate) const REL_TOL: f64 = 1e-9;

/// Convex polygon stored in clockwise order, so that the right normal of
/// every directed edge points into the interior.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    inward_normals: Vec<Vec2>,
    area: f64,
    centroid: Point2,
    perimeter: f64,
    diameter: f64,
}

impl Serialize for ConvexPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertices.serialize(s)
    }
}

fn diameter_of(points: &[Point2]) -> f64 {
    let mut d2: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d2 = d2.max((*a - *b).norm_sq());
        }
    }
    d2.sqrt()
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
}

/// Drops repeated and collinear vertices of a closed polyline.
fn simplify(mut v: Vec<Point2>, tol: f64) -> Vec<Point2> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let mut drop = None;
        for i in 0..n {
            let a = v[(i + n - 1) % n];
            let b = v[i];
            let c = v[(i + 1) % n];
            if (b - a).norm() <= tol {
                drop = Some(i);
                break;
            }
            let base = (c - a).norm();
            // distance of b from line ac; a degenerate base means b folds back
            if base <= tol || ((b - a).cross(c - a)).abs() / base <= tol {
                drop = Some(i);
                break;
            }
        }
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

impl ConvexPolygon {
    /// Builds a polygon from an ordered vertex loop. Either orientation is
    /// accepted; repeated and collinear vertices are dropped and the result is
    /// stored clockwise.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polygon vertex".into()));
        }
        let tol = REL_TOL * diameter_of(&vertices);
        let mut v = simplify(vertices, tol);
        if v.len() < 3 {
            return Err(Error::DegenerateInput("polygon vertices are collinear".into()));
        }
        if !is_convex(&v) || !winds_once(&v) {
            return Err(Error::DegenerateInput("polygon is not convex".into()));
        }
        if signed_area(&v) > 0.0 {
            v[1..].reverse();
        }
        Ok(Self::from_clockwise(v))
    }

    fn from_clockwise(vertices: Vec<Point2>) -> Self {
        let n = vertices.len();
        let mut inward_normals = Vec::with_capacity(n);
        let mut perimeter = 0.0;
        for i in 0..n {
            let e = vertices[(i + 1) % n] - vertices[i];
            let len = e.norm();
            perimeter += len;
            inward_normals.push(e.right_perp() * (1.0 / len));
        }
        let area2 = -2.0 * signed_area(&vertices);
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        // clockwise: sum of cross terms is -area2
        let centroid = Point2::new(cx / (-3.0 * area2), cy / (-3.0 * area2));
        let diameter = diameter_of(&vertices);
        ConvexPolygon {
            vertices,
            inward_normals,
            area: area2 * 0.5,
            centroid,
            perimeter,
            diameter,
        }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, j: usize) -> Point2 {
        self.vertices[j % self.vertices.len()]
    }

    /// Directed edge `j`: `v_j -> v_{j+1}`.
    pub fn edge(&self, j: usize) -> DirectedSegment {
        DirectedSegment::new(self.vertex(j), self.vertex(j + 1))
            .expect("polygon edges are non-degenerate")
    }

    pub fn edges(&self) -> impl Iterator<Item = DirectedSegment> + '_ {
        (0..self.len()).map(move |j| self.edge(j))
    }

    pub fn inward_normals(&self) -> &[Vec2] {
        &self.inward_normals
    }

    pub fn inward_normal(&self, j: usize) -> Vec2 {
        self.inward_normals[j]
    }

    /// Right distance from `a` to the supporting line of edge `j`; positive
    /// on the interior side.
    #[inline]
    pub fn edge_distance(&self, j: usize, a: Point2) -> f64 {
        (a - self.vertices[j]).dot(self.inward_normals[j])
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    /// Arithmetic mean of the vertices.
    pub fn vertex_centroid(&self) -> Point2 {
        let n = self.len() as f64;
        let s = self
            .vertices
            .iter()
            .fold(Point2::ORIGIN, |acc, &v| acc + v);
        s * (1.0 / n)
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Absolute tolerance for predicates on this polygon.
    pub fn tolerance(&self) -> f64 {
        REL_TOL * self.diameter
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Closed containment test; boundary points count as inside.
    pub fn contains(&self, a: Point2) -> bool {
        signed_distance(a, self) >= -self.tolerance()
    }

    /// Rotates by `angle` about `pivot`, then translates by `offset`.
    pub fn transformed(&self, angle: f64, pivot: Point2, offset: Vec2) -> ConvexPolygon {
        let v = self
            .vertices
            .iter()
            .map(|&p| (p - pivot).rotated(angle) + pivot + offset)
            .collect();
        ConvexPolygon::from_clockwise(v)
    }
}

/// True when every non-zero cross product of consecutive edge vectors has the
/// same sign. Collinear triples are skipped.
pub fn is_convex(vertices: &[Point2]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let tol = REL_TOL * diameter_of(vertices);
    let mut sign = 0.0_f64;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let e1 = b - a;
        let e2 = c - b;
        let cross = e1.cross(e2);
        let scale = e1.norm().max(e2.norm());
        if cross.abs() <= tol * scale {
            continue;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}

/// Total turning of the loop is one full turn (rules out star polygons that
/// pass the sign test).
fn winds_once(v: &[Point2]) -> bool {
    let n = v.len();
    let mut total = 0.0;
    for i in 0..n {
        let e1 = v[(i + 1) % n] - v[i];
        let e2 = v[(i + 2) % n] - v[(i + 1) % n];
        total += e1.cross(e2).atan2(e1.dot(e2));
    }
    (total.abs() - std::f64::consts::TAU).abs() < 1e-6
}

/// Convex hull by Andrew's monotone chain; collinear boundary points are
/// dropped.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument("non-finite point".into()));
    }
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "convex hull needs 3 distinct points, got {}",
            pts.len()
        )));
    }
    let tol = REL_TOL * diameter_of_extremes(&pts);
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let keep = |h: &[Point2], p: Point2| {
        let k = h.len();
        let (o, a) = (h[k - 2], h[k - 1]);
        let base = (p - o).norm();
        // strict left turn beyond tolerance
        turn(o, a, p) > tol * base
    };
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && !keep(&lower, p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !keep(&upper, p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("points are collinear".into()));
    }
    ConvexPolygon::new(lower)
}

// bounding-box diagonal: same order as the diameter and O(n)
fn diameter_of_extremes(pts: &[Point2]) -> f64 {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (hi - lo).norm()
}

/// Signed distance from `a` to the line through `seg`, positive on its right.
pub fn right_distance(a: Point2, seg: &DirectedSegment) -> f64 {
    (a - seg.p1()).dot(seg.right_normal())
}

/// Minimum right distance over all edges: positive inside, zero on the
/// boundary, negative outside. Exact Euclidean distance inside; outside it
/// is the distance to the farthest violated supporting line.
pub fn signed_distance(a: Point2, poly: &ConvexPolygon) -> f64 {
    (0..poly.len())
        .map(|j| poly.edge_distance(j, a))
        .fold(f64::INFINITY, f64::min)
}

/// Exact signed Euclidean distance to the polygon boundary.
pub fn euclidean_boundary_distance(a: Point2, poly: &ConvexPolygon) -> f64 {
    let sd = signed_distance(a, poly);
    if sd >= 0.0 {
        return sd;
    }
    let d = poly
        .edges()
        .map(|e| {
            let v = e.direction();
            let t = ((a - e.p1()).dot(v) / v.norm_sq()).clamp(0.0, 1.0);
            a.distance(e.p1() + v * t)
        })
        .fold(f64::INFINITY, f64::min);
    -d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn constructor_orients_clockwise() {
        let sq = unit_square();
        assert!(signed_area(sq.vertices()) < 0.0);
        assert!((sq.area() - 1.0).abs() < 1e-15);
        assert!((sq.perimeter() - 4.0).abs() < 1e-15);
        assert_eq!(sq.centroid(), p(0.5, 0.5));
        for j in 0..4 {
            assert!(sq.edge_distance(j, sq.centroid()) > 0.0);
        }
    }

    #[test]
    fn constructor_drops_collinear_and_duplicates() {
        let poly = ConvexPolygon::new(vec![
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(2.0, 0.0),
            p(2.0, 2.0),
            p(2.0, 2.0),
            p(0.0, 2.0),
        ])
        .unwrap();
        assert_eq!(poly.len(), 4);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0)]).is_err());
        assert!(ConvexPolygon::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).is_err());
        let reflex = vec![p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert!(ConvexPolygon::new(reflex).is_err());
        // pentagram: every turn has the same sign but it winds twice
        let star: Vec<Point2> = (0..5)
            .map(|k| Point2::from_angle(k as f64 * 4.0 * std::f64::consts::PI / 5.0))
            .collect();
        assert!(is_convex(&star));
        assert!(ConvexPolygon::new(star).is_err());
    }

    #[test]
    fn convexity_predicate() {
        let sq = [p(0.0, 0.0), p(0.0, 1.0), p(1.0, 1.0), p(1.0, 0.0)];
        assert!(is_convex(&sq));
        let reflex = [p(0.0, 0.0), p(2.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert!(!is_convex(&reflex));
        for rot in [0.0, 0.3, 1.7, 4.0] {
            let hept: Vec<Point2> = (0..7)
                .map(|k| Point2::from_angle(rot + k as f64 * std::f64::consts::TAU / 7.0))
                .collect();
            assert!(is_convex(&hept));
        }
        // collinear triple skipped
        let with_mid = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0)];
        assert!(is_convex(&with_mid));
    }

    #[test]
    fn hull_examples() {
        let sq = convex_hull(&[p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]).unwrap();
        assert_eq!(sq.len(), 4);
        let mut vs = sq.vertices().to_vec();
        vs.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_eq!(vs, vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 0.0), p(1.0, 1.0)]);

        let h = convex_hull(&[p(0.0, 0.0), p(2.0, 0.0), p(2.0, 2.0), p(0.0, 2.0), p(1.0, 1.0)])
            .unwrap();
        assert_eq!(h.len(), 4);
        assert!(!h.vertices().contains(&p(1.0, 1.0)));
        assert!((h.area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hull_degenerate() {
        assert!(matches!(
            convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(3.0, 3.0)]),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            convex_hull(&[p(0.0, 0.0), p(0.0, 0.0), p(1.0, 1.0)]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn right_distance_examples() {
        let seg = DirectedSegment::new(p(0.0, 0.0), p(1.0, 0.0)).unwrap();
        assert_eq!(right_distance(p(0.0, -1.0), &seg), 1.0);
        assert_eq!(right_distance(p(0.0, 1.0), &seg), -1.0);
        assert_eq!(right_distance(p(0.5, 0.0), &seg), 0.0);
    }

    #[test]
    fn signed_distance_examples() {
        let sq = unit_square();
        assert!((signed_distance(sq.centroid(), &sq) - 0.5).abs() < 1e-15);
        assert!((signed_distance(p(2.0, 0.5), &sq) + 1.0).abs() < 1e-15);
        assert_eq!(signed_distance(p(1.0, 0.5), &sq), 0.0);
        assert!(sq.contains(p(1.0, 0.5)));
    }

    #[test]
    fn exterior_distances_differ_near_vertices() {
        let sq = unit_square();
        let a = p(2.0, 2.0);
        assert!((signed_distance(a, &sq) + 1.0).abs() < 1e-15);
        assert!((euclidean_boundary_distance(a, &sq) + 2f64.sqrt()).abs() < 1e-15);
        let inside = p(0.25, 0.6);
        assert_eq!(euclidean_boundary_distance(inside, &sq), signed_distance(inside, &sq));
    }

    #[test]
    fn vertex_centroid_differs_from_area_centroid() {
        let poly = ConvexPolygon::new(vec![p(0.0, 0.0), p(4.0, 0.0), p(4.0, 1.0), p(3.5, 1.0)])
            .unwrap();
        let vc = poly.vertex_centroid();
        assert!((vc.x - 2.875).abs() < 1e-12 && (vc.y - 0.5).abs() < 1e-12);
        assert!(poly.centroid().distance(vc) > 1e-3);
    }
}
