//! SVG 1.1 rendering of a polygon and its circles.
//!
//! The y axis is flipped so the picture matches the usual math orientation.
//! Numbers are printed with a fixed number of decimals so that identical
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::boundary::{generate_encircling_points, BoundaryEncirclingPointSet};
use crate::error::Result;
use crate::metrics::RunReport;
use crate::geometry::{clipped_voronoi, minimum_bounding_rectangle, CircleConfiguration, ConvexPolygon, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Output width in pixels; the height follows the aspect ratio.
    pub width_px: f64,
    pub voronoi: bool,
    pub precision: usize,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width_px: 800.0,
            voronoi: false,
            precision: 4,
        }
    }
}

struct Num(f64, usize);

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = format!("{:.*}", self.1, self.0);
        // never print "-0.0000"
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            write!(f, "{}", s.trim_start_matches('-'))
        } else {
            f.write_str(&s)
        }
    }
}

fn points_attr(pts: &[Point2], prec: usize) -> String {
    let mut s = String::new();
    for (k, p) in pts.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", Num(p.x, prec), Num(-p.y, prec));
    }
    s
}

/// Axis-aligned box of the minimum bounding rectangle, grown by 5% of its
/// larger side on every edge: `(min_x, min_y, width, height)` in flipped
/// coordinates.
pub fn view_box(poly: &ConvexPolygon) -> (f64, f64, f64, f64) {
    let mbr = minimum_bounding_rectangle(poly);
    let (mut lo, mut hi) = (mbr.corners[0], mbr.corners[0]);
    for c in &mbr.corners[1..] {
        lo = Point2::new(lo.x.min(c.x), lo.y.min(c.y));
        hi = Point2::new(hi.x.max(c.x), hi.y.max(c.y));
    }
    let margin = 0.05 * (hi.x - lo.x).max(hi.y - lo.y);
    (
        lo.x - margin,
        -hi.y - margin,
        hi.x - lo.x + 2.0 * margin,
        hi.y - lo.y + 2.0 * margin,
    )
}

/// Renders the scene. `cfg` may be empty, in which case only the polygon is
/// drawn.
pub fn render_svg(
    poly: &ConvexPolygon,
    cfg: &CircleConfiguration,
    encircling: Option<&BoundaryEncirclingPointSet>,
    opts: &SvgOptions,
) -> String {
    let p = opts.precision;
    let (x0, y0, w, h) = view_box(poly);
    let height_px = opts.width_px * h / w;
    let stroke = 0.002 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        Num(opts.width_px, 0),
        Num(height_px, 0),
        Num(x0, p),
        Num(y0, p),
        Num(w, p),
        Num(h, p)
    );
    let _ = writeln!(
        s,
        r##"<polygon id="polygon" points="{}" fill="#f4f4f4" stroke="#000000" stroke-width="{}"/>"##,
        points_attr(poly.vertices(), p),
        Num(stroke * 1.5, p)
    );
    if opts.voronoi && cfg.len() >= 2 {
        if let Ok(cells) = clipped_voronoi(&cfg.centers, poly) {
            let _ = writeln!(
                s,
                r##"<g id="voronoi" fill="none" stroke="#7a9cc6" stroke-width="{}">"##,
                Num(stroke * 0.5, p)
            );
            for cell in cells {
                let _ = writeln!(s, r#"<polygon points="{}"/>"#, points_attr(cell.polygon.vertices(), p));
            }
            let _ = writeln!(s, "</g>");
        }
    }
    if !cfg.is_empty() {
        let _ = writeln!(
            s,
            r##"<g id="circles" fill="#3b7dd8" fill-opacity="0.35" stroke="#1d4f91" stroke-width="{}">"##,
            Num(stroke, p)
        );
        for c in &cfg.centers {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                Num(c.x, p),
                Num(-c.y, p),
                Num(cfg.radius, p)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    if let Some(set) = encircling {
        let _ = writeln!(s, r##"<g id="encircling" fill="#d8483b">"##);
        for q in &set.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{}" cy="{}" r="{}"/>"#,
                Num(q.position.x, p),
                Num(-q.position.y, p),
                Num(stroke * 2.0, p)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// Renders a finished run: polygon, final circles and the encircling
/// points the boundary stage aimed for.
pub fn render_report(report: &RunReport, opts: &SvgOptions) -> Result<String> {
    let poly = ConvexPolygon::new(report.polygon.clone())?;
    let cfg = CircleConfiguration::new(report.centers.clone(), report.radius)?;
    let points = generate_encircling_points(&poly, cfg.len(), cfg.radius, report.boundary.alpha_offset);
    Ok(render_svg(&poly, &cfg, Some(&points), opts))
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(10.0, 0.0),
            Point2::new(10.0, 10.0),
            Point2::new(0.0, 10.0),
        ])
        .unwrap()
    }

    #[test]
    fn empty_config_draws_polygon_only() {
        let cfg = CircleConfiguration {
            centers: vec![],
            radius: 1.0,
        };
        let svg = render_svg(&square(), &cfg, None, &SvgOptions::default());
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(svg.contains(r#"viewBox="-0.5000 -10.5000 11.0000 11.0000""#));
    }

    #[test]
    fn one_element_per_circle() {
        let cfg = CircleConfiguration::new(
            (0..7).map(|i| Point2::new(1.0 + i as f64, 5.0)).collect(),
            0.5,
        )
        .unwrap();
        let svg = render_svg(&square(), &cfg, None, &SvgOptions::default());
        assert_eq!(svg.matches("<circle").count(), 7);
        assert!(svg.contains(r#"cy="-5.0000""#));
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(Num(-0.00001, 4).to_string(), "0.0000");
        assert_eq!(Num(-1.5, 1).to_string(), "-1.5");
    }
}
