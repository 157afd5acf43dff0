//! Curvature of locally convex type.
//!
//! For a query point `p`, `r_lct(p)` is the infimum of the radii `r` for
//! which the closed disk `B(p, r)` meets the curve in a disconnected set,
//! and `K_lct(p) = 1 / r_lct(p)` (zero when no radius disconnects). The set
//! of points with positive `K_lct` is written `Pi(S)`.

use rayon::prelude::*;

use crate::curve::ParametricCurve;
use crate::foot::{all_feet, Foot, FootKind, FootSet};
use crate::geometry::{Point2, Window};
use crate::numeric::brent_minimize;
use crate::DEFAULT_N_SCAN;

/// Relative margin above the second distance at which disconnection is
/// tested. Near evolute cusps the separating maximum rises only slightly
/// above the second minimum, so the margin stays close to roundoff.
pub const DISCONNECTION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LcltResult {
    pub k_lct: f64,
    pub r_lct: f64,
    /// Local-minimum feet sorted by distance.
    pub feet_used: Vec<Foot>,
    pub member_of_pi: bool,
}

impl LcltResult {
    fn empty(feet_used: Vec<Foot>) -> Self {
        LcltResult {
            k_lct: 0.0,
            r_lct: f64::INFINITY,
            feet_used,
            member_of_pi: false,
        }
    }
}

/// Number of connected components of `{t : d(p, S(t)) <= level}`, read off
/// the ordered sequence of distance extrema.
///
/// Between consecutive extrema the distance is monotone, so the sublevel
/// set is a union of runs of extrema lying at or below `level`.
pub fn sublevel_components(c: &ParametricCurve, p: Point2, feet: &FootSet, level: f64) -> usize {
    if feet.is_flat() {
        return usize::from(feet.feet[0].distance <= level);
    }
    let mut extrema: Vec<(f64, f64)> = feet
        .feet
        .iter()
        .filter(|f| f.kind != FootKind::Degenerate)
        .map(|f| (f.t, f.distance))
        .collect();
    if !c.is_closed() {
        let (lo, hi) = c.domain();
        for t in [lo, hi] {
            if !extrema.iter().any(|&(s, _)| s == t) {
                extrema.push((t, c.position(t).distance(p)));
            }
        }
    }
    extrema.sort_by(|a, b| a.0.total_cmp(&b.0));
    let below: Vec<bool> = extrema.iter().map(|&(_, d)| d <= level).collect();
    let n = below.len();
    if n == 0 {
        return 0;
    }
    let starts = (0..n)
        .filter(|&i| {
            below[i]
                && if i == 0 {
                    !c.is_closed() || !below[n - 1]
                } else {
                    !below[i - 1]
                }
        })
        .count();
    if starts == 0 && below.iter().all(|&b| b) {
        1
    } else {
        starts
    }
}

/// `K_lct` at `p` from the second-smallest local-minimum distance, guarded
/// by a check that the sublevel set just above that distance really is
/// disconnected.
pub fn lclt_curvature(c: &ParametricCurve, p: Point2) -> LcltResult {
    lclt_curvature_with(c, p, DEFAULT_N_SCAN)
}

pub fn lclt_curvature_with(c: &ParametricCurve, p: Point2, n_scan: usize) -> LcltResult {
    let feet = all_feet(c, p, n_scan);
    if feet.is_flat() {
        return LcltResult::empty(Vec::new());
    }
    let minima: Vec<Foot> = feet.minima().cloned().collect();
    if minima.len() < 2 {
        return LcltResult::empty(minima);
    }
    let d2 = minima[1].distance;
    let level = d2 + DISCONNECTION_EPS * c.diameter();
    if sublevel_components(c, p, &feet, level) < 2 {
        return LcltResult::empty(minima);
    }
    LcltResult {
        k_lct: if d2 > 0.0 { 1.0 / d2 } else { f64::INFINITY },
        r_lct: d2,
        feet_used: minima,
        member_of_pi: true,
    }
}

/// Brute-force disconnection radius from `n` distance samples.
///
/// Samples are added in order of increasing distance while the number of
/// connected runs (on an interval or a cycle, following the curve's
/// topology) is tracked; the radius is the distance at which a second run
/// first appears, refined by minimizing the distance between the samples
/// adjacent to the one that opened the run. Returns infinity when no radius
/// disconnects or the profile is constant.
pub fn disconnection_radius_oracle(c: &ParametricCurve, p: Point2, n: usize) -> f64 {
    let n = n.max(1000);
    let (lo, hi) = c.domain();
    let closed = c.is_closed();
    let ts: Vec<f64> = if closed {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
    } else {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };
    let dist = |t: f64| c.position(t).distance(p);
    let d: Vec<f64> = ts.iter().map(|&t| dist(t)).collect();
    let (dmin, dmax, dsum) = d
        .iter()
        .fold((f64::INFINITY, 0.0f64, 0.0), |(a, b, s), &x| (a.min(x), b.max(x), s + x));
    if dmax - dmin <= 1e-9 * dsum / n as f64 {
        return f64::INFINITY;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let mut added = vec![false; n];
    let mut components = 0usize;
    let neighbors = |i: usize| -> [Option<usize>; 2] {
        if closed {
            [Some((i + n - 1) % n), Some((i + 1) % n)]
        } else {
            [i.checked_sub(1), (i + 1 < n).then_some(i + 1)]
        }
    };
    for (count, &i) in order.iter().enumerate() {
        let joined = neighbors(i).iter().flatten().filter(|&&j| added[j]).count();
        added[i] = true;
        if closed && count + 1 == n {
            break;
        }
        components = components + 1 - joined;
        if components >= 2 {
            let step = (hi - lo) / if closed { n as f64 } else { (n - 1) as f64 };
            let (mut a, mut b) = (ts[i] - step, ts[i] + step);
            if !closed {
                a = a.max(lo);
                b = b.min(hi);
            }
            let (_, refined) = brent_minimize(dist, a, b, 1e-12 * (hi - lo), 200);
            return refined.min(d[i]);
        }
    }
    f64::INFINITY
}

/// Grid of `K_lct` values over a window, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub window: Window,
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        cell_center(&self.window, self.cols, self.rows, row, col)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn positive_count(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn cell_area(&self) -> f64 {
        self.window.width() * self.window.height() / (self.cols * self.rows) as f64
    }

    /// Largest finite value, or zero for an empty field.
    pub fn max_finite(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |a: f64, &b| a.max(b))
    }
}

pub fn cell_center(window: &Window, cols: usize, rows: usize, row: usize, col: usize) -> Point2 {
    let dx = window.width() / cols as f64;
    let dy = window.height() / rows as f64;
    Point2::new(
        window.x0 + (col as f64 + 0.5) * dx,
        window.y1 - (row as f64 + 0.5) * dy,
    )
}

/// Evaluates `K_lct` at every cell center of a `cols x rows` grid. Cells
/// are independent and computed in parallel; the result does not depend on
/// scheduling.
pub fn pi_set_raster(c: &ParametricCurve, window: Window, cols: usize, rows: usize) -> Raster {
    pi_set_raster_with(c, window, cols, rows, DEFAULT_N_SCAN)
}

pub fn pi_set_raster_with(
    c: &ParametricCurve,
    window: Window,
    cols: usize,
    rows: usize,
    n_scan: usize,
) -> Raster {
    assert!(window.is_nonempty(), "raster window must be nonempty");
    assert!(cols >= 1 && rows >= 1);
    let values = (0..rows * cols)
        .into_par_iter()
        .map(|k| {
            let p = cell_center(&window, cols, rows, k / cols, k % cols);
            lclt_curvature_with(c, p, n_scan).k_lct
        })
        .collect();
    Raster {
        window,
        cols,
        rows,
        values,
    }
}
