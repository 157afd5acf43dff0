//! Plain-text writers: CSV tables, PGM/PBM rasters and SVG figures.
//!
//! Every CSV starts with a `# config_hash=...` line followed by the column
//! header. Numbers use Rust's shortest round-trip formatting, so output is
//! byte-identical for identical inputs.

use std::fmt::Write;

use crate::curve::ParametricCurve;
use crate::divider::DividerTrace;
use crate::evolute::EvoluteCusp;
use crate::geometry::{Point2, Window};
use crate::lattice::{Bitmap, DistanceField};
use crate::lclt::Raster;

fn preamble(hash: &str, columns: &[&str]) -> String {
    format!("# config_hash={hash}\n{}\n", columns.join(","))
}

pub fn divider_csv(trace: &DividerTrace, hash: &str) -> String {
    let mut s = preamble(
        hash,
        &[
            "index", "side", "kind", "t1", "t2", "x10", "x20", "radius", "res_t1", "res_t2", "res_dist",
            "feet_count", "boundary_foot", "flat", "polyline",
        ],
    );
    let mut line_of = vec![-1i64; trace.points.len()];
    for (k, line) in trace.polylines.iter().enumerate() {
        for &i in line {
            if line_of[i] < 0 {
                line_of[i] = k as i64;
            }
        }
    }
    for (i, p) in trace.points.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.side.name(),
            p.kind.name(),
            p.t1,
            p.t2,
            p.center.x1,
            p.center.x2,
            p.radius,
            p.residuals[0],
            p.residuals[1],
            p.residuals[2],
            p.feet.len(),
            u8::from(p.boundary_foot),
            u8::from(p.flat),
            line_of[i],
        );
    }
    s
}

pub fn lclt_csv(raster: &Raster, hash: &str) -> String {
    let mut s = preamble(hash, &["row", "col", "x", "y", "k_lct"]);
    for row in 0..raster.rows {
        for col in 0..raster.cols {
            let p = raster.cell_center(row, col);
            let _ = writeln!(s, "{row},{col},{},{},{}", p.x1, p.x2, raster.get(row, col));
        }
    }
    s
}

/// Plain PGM with values scaled to `0..=255` by the largest finite value;
/// infinite values map to 255.
pub fn raster_pgm(raster: &Raster) -> String {
    let max = raster.max_finite();
    let mut s = format!("P2\n{} {}\n255\n", raster.cols, raster.rows);
    for row in 0..raster.rows {
        let line: Vec<String> = (0..raster.cols)
            .map(|col| {
                let v = raster.get(row, col);
                let level = if !v.is_finite() {
                    255
                } else if max > 0.0 {
                    (255.0 * v / max).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                };
                level.to_string()
            })
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn evolute_csv(cusps: &[EvoluteCusp], hash: &str) -> String {
    let mut s = preamble(hash, &["index", "t", "x", "y", "radius", "kind"]);
    for (i, c) in cusps.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{},{},{},{}", c.t, c.center.x1, c.center.x2, c.radius, c.kind.name());
    }
    s
}

pub fn lattice_csv(mask: &Bitmap, field: Option<&DistanceField>, hash: &str) -> String {
    let mut s = preamble(hash, &["x", "y", "distance", "feet_count"]);
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            let (d, n) = field.map_or((f64::NAN, 0), |f| (f.get(x, y), f.feet_of(x, y).len()));
            let _ = writeln!(s, "{x},{y},{d},{n}");
        }
    }
    s
}

/// A figure in plane coordinates, drawn with the `x2` axis pointing up.
#[derive(Debug, Clone)]
pub struct Svg {
    window: Window,
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    /// `width_px` sets the pixel width; the height follows the window's
    /// aspect ratio.
    pub fn new(window: Window, width_px: f64) -> Self {
        let height = width_px * window.height() / window.width();
        Svg {
            window,
            width: width_px,
            height,
            body: String::new(),
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        let sx = (p.x1 - self.window.x0) / self.window.width() * self.width;
        let sy = (self.window.y1 - p.x2) / self.window.height() * self.height;
        (sx, sy)
    }

    pub fn polyline(&mut self, points: &[Point2], color: &str, stroke: f64) {
        if points.len() < 2 {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .filter(|p| p.is_finite())
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{stroke}" points="{}"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, p: Point2, color: &str, radius: f64) {
        if !p.is_finite() {
            return;
        }
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{color}"/>"#);
    }

    pub fn curve(&mut self, c: &ParametricCurve, samples: usize, color: &str, stroke: f64) {
        let mut pts = c.sample(samples);
        if c.is_closed() {
            if let Some(&first) = pts.first() {
                pts.push(first);
            }
        }
        self.polyline(&pts, color, stroke);
    }

    pub fn finish(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Curve in black, evolute in blue, Divider in red.
pub fn divider_svg(c: &ParametricCurve, trace: &DividerTrace, evolute: &[Vec<Point2>], window: Window) -> String {
    let mut svg = Svg::new(window, 800.0);
    svg.curve(c, 2000, "black", 1.5);
    for line in evolute {
        svg.polyline(line, "blue", 0.8);
    }
    let mut on_line = vec![false; trace.points.len()];
    for line in &trace.polylines {
        let pts: Vec<Point2> = line.iter().map(|&i| trace.points[i].center).collect();
        svg.polyline(&pts, "red", 1.5);
        for &i in line {
            on_line[i] = true;
        }
    }
    for (i, p) in trace.points.iter().enumerate() {
        if !on_line[i] {
            svg.dot(p.center, "red", 2.0);
        }
    }
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_scaling() {
        let r = Raster {
            window: Window::new(0.0, 0.0, 1.0, 1.0),
            cols: 2,
            rows: 1,
            values: vec![0.5, 1.0],
        };
        assert_eq!(raster_pgm(&r), "P2\n2 1\n255\n128 255\n");
    }

    #[test]
    fn svg_flips_y() {
        let mut s = Svg::new(Window::new(0.0, 0.0, 2.0, 1.0), 200.0);
        s.dot(Point2::new(0.0, 1.0), "red", 1.0);
        let out = s.finish();
        assert!(out.contains(r#"width="200" height="100""#));
        assert!(out.contains(r#"cx="0.000" cy="0.000""#));
    }
}
