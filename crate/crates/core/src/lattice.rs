//! Discrete Divider on bitmaps.
//!
//! Cells are addressed `(x, y)` with `y = 0` the top row. The boundary is the
//! set of foreground cells 4-adjacent to a background cell; cells outside
//! the image are neither foreground nor background, so a bitmap filled to
//! its edges has no boundary.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::geometry::MetricKind;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    cells: Vec<bool>,
}

impl Bitmap {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Parse(format!("bitmap dimensions {width}x{height}")));
        }
        Ok(Bitmap {
            width,
            height,
            cells: vec![false; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut b = Bitmap::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                b.cells[y * width + x] = f(x, y);
            }
        }
        Ok(b)
    }

    /// A `w x h` filled rectangle with a background margin of `margin` cells.
    pub fn rectangle(w: usize, h: usize, margin: usize) -> Result<Self> {
        Bitmap::from_fn(w + 2 * margin, h + 2 * margin, |x, y| {
            x >= margin && x < margin + w && y >= margin && y < margin + h
        })
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.cells[y * self.width + x] = value;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Foreground cells with a background 4-neighbour.
    pub fn boundary(&self) -> Vec<bool> {
        let (w, h) = (self.width, self.height);
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                if !self.get(x, y) {
                    continue;
                }
                let bg = |xx: isize, yy: isize| {
                    xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h && !self.get(xx as usize, yy as usize)
                };
                let (xi, yi) = (x as isize, y as isize);
                out[y * w + x] = bg(xi - 1, yi) || bg(xi + 1, yi) || bg(xi, yi - 1) || bg(xi, yi + 1);
            }
        }
        out
    }

    /// Parses plain PBM (`P1`) or PGM (`P2`); nonzero cells are foreground.
    pub fn parse(text: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        let mut tokens = body.split_whitespace();
        let magic = tokens.next().ok_or_else(|| Error::Parse("empty bitmap".into()))?;
        let mut number = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what}")))
        };
        let width = number("width")?;
        let height = number("height")?;
        let values: Vec<bool> = match magic {
            "P1" => {
                // plain PBM allows bits without separating whitespace
                let rest: String = tokens.collect();
                rest.chars()
                    .map(|ch| match ch {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        other => Err(Error::Parse(format!("bad PBM bit `{other}`"))),
                    })
                    .collect::<Result<_>>()?
            }
            "P2" => {
                let _maxval = number("maxval")?;
                tokens
                    .map(|t| {
                        t.parse::<u64>()
                            .map(|v| v != 0)
                            .map_err(|_| Error::Parse(format!("bad PGM value `{t}`")))
                    })
                    .collect::<Result<_>>()?
            }
            other => return Err(Error::Parse(format!("unsupported format `{other}`"))),
        };
        if values.len() != width * height {
            return Err(Error::Parse(format!(
                "expected {} cells, found {}",
                width * height,
                values.len()
            )));
        }
        let mut b = Bitmap::new(width, height)?;
        b.cells = values;
        Ok(b)
    }

    /// Plain PBM, one token per cell, one line per row.
    pub fn to_pbm(&self) -> String {
        let mut s = format!("P1\n{} {}\n", self.width, self.height);
        for row in self.cells.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&c| if c { "1" } else { "0" }).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    pub width: usize,
    pub height: usize,
    pub metric: MetricKind,
    pub feet_tolerance: f64,
    /// Distance to the nearest boundary cell; infinite on background cells.
    pub dist: Vec<f64>,
    /// Boundary cells (as row-major indices) within `dist + feet_tolerance`.
    pub feet: Vec<Vec<usize>>,
    pub boundary: Vec<bool>,
}

impl DistanceField {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.dist[y * self.width + x]
    }

    pub fn feet_of(&self, x: usize, y: usize) -> &[usize] {
        &self.feet[y * self.width + x]
    }
}

pub fn distance_transform(b: &Bitmap, m: MetricKind) -> Result<DistanceField> {
    distance_transform_with(b, m, LatticeParams::default().feet_tolerance)
}

/// Exact distance transform to the boundary set. Chamfer passes are exact
/// for the maximum-coordinate (8-neighbour unit steps) and addition
/// (4-neighbour unit steps) metrics; Euclidean distances use the separable
/// lower-envelope transform of squared distances.
pub fn distance_transform_with(b: &Bitmap, m: MetricKind, feet_tolerance: f64) -> Result<DistanceField> {
    if b.is_empty() {
        return Err(Error::EmptyForeground);
    }
    let boundary = b.boundary();
    if !boundary.iter().any(|&v| v) {
        return Err(Error::EmptyBoundary);
    }
    let (w, h) = (b.width, b.height);
    let mut dist = match m {
        MetricKind::MaxCoordinate => chamfer(&boundary, w, h, true),
        MetricKind::Addition => chamfer(&boundary, w, h, false),
        MetricKind::Euclidean => euclidean(&boundary, w, h),
    };
    for (d, &fg) in dist.iter_mut().zip(b.cells()) {
        if !fg {
            *d = f64::INFINITY;
        }
    }
    let feet = (0..w * h)
        .into_par_iter()
        .map(|k| {
            let d = dist[k];
            if !d.is_finite() {
                return Vec::new();
            }
            let (x, y) = (k % w, k / w);
            let reach = (d + feet_tolerance).floor() as usize;
            let mut out = Vec::new();
            for yy in y.saturating_sub(reach)..=(y + reach).min(h - 1) {
                for xx in x.saturating_sub(reach)..=(x + reach).min(w - 1) {
                    if boundary[yy * w + xx] && cell_distance(m, x, y, xx, yy) <= d + feet_tolerance {
                        out.push(yy * w + xx);
                    }
                }
            }
            out
        })
        .collect();
    Ok(DistanceField {
        width: w,
        height: h,
        metric: m,
        feet_tolerance,
        dist,
        feet,
        boundary,
    })
}

pub fn cell_distance(m: MetricKind, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
    m.norm(x0 as f64 - x1 as f64, y0 as f64 - y1 as f64)
}

fn chamfer(seeds: &[bool], w: usize, h: usize, diagonal: bool) -> Vec<f64> {
    let big = (w + h + 2) as f64 * 2.0;
    let mut d: Vec<f64> = seeds.iter().map(|&s| if s { 0.0 } else { big }).collect();
    let forward: &[(isize, isize)] = if diagonal {
        &[(-1, 0), (-1, -1), (0, -1), (1, -1)]
    } else {
        &[(-1, 0), (0, -1)]
    };
    let relax = |d: &mut Vec<f64>, x: usize, y: usize, offsets: &[(isize, isize)], sign: isize| {
        let mut best = d[y * w + x];
        for &(dx, dy) in offsets {
            let (xx, yy) = (x as isize + sign * dx, y as isize + sign * dy);
            if xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h {
                best = best.min(d[yy as usize * w + xx as usize] + 1.0);
            }
        }
        d[y * w + x] = best;
    };
    for y in 0..h {
        for x in 0..w {
            relax(&mut d, x, y, forward, 1);
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            relax(&mut d, x, y, forward, -1);
        }
    }
    d
}

/// Lower envelope of parabolas `f[q] + (p - q)^2` for every `p`.
fn envelope(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![f64::INFINITY; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    let first = match f.iter().position(|x| x.is_finite()) {
        Some(i) => i,
        None => return out,
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let mut s = intersection(f, v[k], q);
        while s <= z[k] {
            k -= 1;
            s = intersection(f, v[k], q);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    let mut k = 0;
    for (p, o) in out.iter_mut().enumerate() {
        while z[k + 1] < p as f64 {
            k += 1;
        }
        let q = v[k];
        let dq = p as f64 - q as f64;
        *o = f[q] + dq * dq;
    }
    out
}

fn intersection(f: &[f64], p: usize, q: usize) -> f64 {
    ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
}

fn euclidean(seeds: &[bool], w: usize, h: usize) -> Vec<f64> {
    let mut cols = vec![f64::INFINITY; w * h];
    let columns: Vec<Vec<f64>> = (0..w)
        .into_par_iter()
        .map(|x| {
            let f: Vec<f64> = (0..h).map(|y| if seeds[y * w + x] { 0.0 } else { f64::INFINITY }).collect();
            envelope(&f)
        })
        .collect();
    for (x, col) in columns.iter().enumerate() {
        for (y, &v) in col.iter().enumerate() {
            cols[y * w + x] = v;
        }
    }
    cols.par_chunks(w).flat_map_iter(|row| envelope(row).into_iter().map(f64::sqrt)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub separation_factor: f64,
    /// Extra distance, in cells, within which boundary cells count as feet.
    pub feet_tolerance: f64,
    pub thin: bool,
}

impl Default for LatticeParams {
    fn default() -> Self {
        LatticeParams {
            separation_factor: 2.0,
            feet_tolerance: 1.0,
            thin: false,
        }
    }
}

pub fn discrete_divider(b: &Bitmap, m: MetricKind) -> Result<Bitmap> {
    discrete_divider_with(b, m, &LatticeParams::default()).map(|(mask, _)| mask)
}

/// Divider cells and the distance field they were read from.
///
/// A foreground cell at positive distance `D` is a divider cell when two of
/// its feet are more than `separation_factor * (D + feet_tolerance)` apart
/// along the boundary (8-connected paths through boundary cells; feet on
/// different boundary components are infinitely apart), or when it is a
/// strict local maximum of the distance among its foreground 8-neighbours.
/// A bitmap with no boundary yields an empty divider.
pub fn discrete_divider_with(b: &Bitmap, m: MetricKind, params: &LatticeParams) -> Result<(Bitmap, Option<DistanceField>)> {
    let field = match distance_transform_with(b, m, params.feet_tolerance) {
        Ok(f) => f,
        Err(Error::EmptyBoundary) => return Ok((Bitmap::new(b.width, b.height)?, None)),
        Err(e) => return Err(e),
    };
    let (w, h) = (b.width, b.height);
    let flags: Vec<bool> = (0..w * h)
        .into_par_iter()
        .map(|k| {
            let d = field.dist[k];
            if !d.is_finite() || d <= 0.0 {
                return false;
            }
            let (x, y) = (k % w, k / w);
            let limit = params.separation_factor * (d + params.feet_tolerance);
            separated(&field.boundary, w, h, &field.feet[k], limit) || strict_local_max(&field, x, y)
        })
        .collect();
    let mut mask = Bitmap::new(w, h)?;
    mask.cells = flags;
    if params.thin {
        thin(&mut mask);
    }
    Ok((mask, Some(field)))
}

fn strict_local_max(field: &DistanceField, x: usize, y: usize) -> bool {
    let d = field.get(x, y);
    neighbours8(x, y, field.width, field.height).all(|(xx, yy)| {
        let v = field.get(xx, yy);
        !v.is_finite() || v < d
    })
}

fn neighbours8(x: usize, y: usize, w: usize, h: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1isize..=1)
        .flat_map(|dy| (-1isize..=1).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| dx != 0 || dy != 0)
        .filter_map(move |(dx, dy)| {
            let (xx, yy) = (x as isize + dx, y as isize + dy);
            (xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h).then_some((xx as usize, yy as usize))
        })
}

/// Whether some pair of `feet` is more than `limit` steps apart along the
/// boundary.
fn separated(boundary: &[bool], w: usize, h: usize, feet: &[usize], limit: f64) -> bool {
    if feet.len() < 2 {
        return false;
    }
    let cap = limit.floor() as usize;
    let mut seen: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut queue = VecDeque::new();
    for &start in feet {
        seen.clear();
        queue.clear();
        seen.insert(start, 0);
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let steps = seen[&k];
            if steps >= cap {
                continue;
            }
            for (xx, yy) in neighbours8(k % w, k / w, w, h) {
                let j = yy * w + xx;
                if boundary[j] && !seen.contains_key(&j) {
                    seen.insert(j, steps + 1);
                    queue.push_back(j);
                }
            }
        }
        if feet.iter().any(|f| !seen.contains_key(f)) {
            return true;
        }
    }
    false
}

/// One pass of Zhang-Suen thinning (both sub-iterations).
pub fn thin(mask: &mut Bitmap) {
    let (w, h) = (mask.width, mask.height);
    for step in 0..2 {
        let mut remove = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !mask.get(x, y) {
                    continue;
                }
                let at = |dx: isize, dy: isize| -> bool {
                    let (xx, yy) = (x as isize + dx, y as isize + dy);
                    xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h && mask.get(xx as usize, yy as usize)
                };
                // P2..P9 clockwise from north
                let p = [at(0, -1), at(1, -1), at(1, 0), at(1, 1), at(0, 1), at(-1, 1), at(-1, 0), at(-1, -1)];
                let count = p.iter().filter(|&&v| v).count();
                let transitions = (0..8).filter(|&i| !p[i] && p[(i + 1) % 8]).count();
                let cond = if step == 0 {
                    !(p[0] && p[2] && p[4]) && !(p[2] && p[4] && p[6])
                } else {
                    !(p[0] && p[2] && p[6]) && !(p[0] && p[4] && p[6])
                };
                if (2..=6).contains(&count) && transitions == 1 && cond {
                    remove.push((x, y));
                }
            }
        }
        for (x, y) in remove {
            mask.set(x, y, false);
        }
    }
}

/// Number of 8-connected components of a mask.
pub fn components8(mask: &Bitmap) -> usize {
    let (w, h) = (mask.width, mask.height);
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if !mask.cells[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(k) = stack.pop() {
            for (xx, yy) in neighbours8(k % w, k / w, w, h) {
                let j = yy * w + xx;
                if mask.cells[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}
