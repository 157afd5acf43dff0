//! Feet: stationary points of the distance from a query point to a curve.
//!
//! A foot of `p` on `S` is a parameter `t` with `(S(t) - p) . S'(t) = 0`,
//! i.e. the segment from `p` to `S(t)` is normal to the curve. Feet are
//! classified by the lowest non-vanishing derivative of
//! `phi(t) = |S(t) - p|^2 / 2`.

use crate::curve::{ParametricCurve, Shape};
use crate::geometry::Point2;
use crate::numeric::safeguarded_newton;
use crate::{Error, Result};

/// Iteration budget of the safeguarded Newton refinement.
pub const MAX_ITERATIONS: usize = 60;

/// `order` value of a foot at which every derivative up to the fourth
/// vanishes (locally constant distance).
pub const FLAT_ORDER: u8 = 5;

const MERGE_FRACTION: f64 = 1e-6;
const CONSTANT_PROFILE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FootKind {
    LocalMin,
    LocalMax,
    Degenerate,
}

impl FootKind {
    pub fn name(self) -> &'static str {
        match self {
            FootKind::LocalMin => "min",
            FootKind::LocalMax => "max",
            FootKind::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Foot {
    pub t: f64,
    pub point: Point2,
    pub distance: f64,
    pub kind: FootKind,
    /// Order of the derivative of `phi` that decided `kind`; 1 for one-sided
    /// endpoint feet, [`FLAT_ORDER`] when nothing up to order 4 is nonzero.
    pub order: u8,
    /// Endpoint of an open curve classified by one-sided comparison.
    pub boundary: bool,
    /// Parameter interval over which the distance is constant, for flat
    /// profiles.
    pub arc: Option<(f64, f64)>,
}

impl Foot {
    pub fn is_flat(&self) -> bool {
        self.kind == FootKind::Degenerate && self.order >= FLAT_ORDER
    }
}

/// Result of [`all_feet`]: the feet sorted by distance and the number of
/// candidates dropped because their refinement failed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FootSet {
    pub feet: Vec<Foot>,
    pub warnings: usize,
}

impl FootSet {
    pub fn minima(&self) -> impl Iterator<Item = &Foot> {
        self.feet.iter().filter(|f| f.kind == FootKind::LocalMin)
    }

    pub fn is_flat(&self) -> bool {
        self.feet.len() == 1 && self.feet[0].is_flat()
    }
}

/// `phi'(t) = (S(t) - p) . S'(t)`.
pub fn residual(c: &ParametricCurve, p: Point2, t: f64) -> f64 {
    (c.position(t) - p).dot(c.derivative(1, t))
}

fn residual_and_slope(c: &ParametricCurve, p: Point2, t: f64) -> (f64, f64) {
    let d = c.position(t) - p;
    let d1 = c.derivative(1, t);
    let d2 = c.derivative(2, t);
    (d.dot(d1), d.dot(d2) + d1.norm_sq())
}

/// Derivatives 2, 3 and 4 of `phi` at `t`, each paired with the magnitude
/// of the terms that produced it (the cancellation scale).
pub fn phi_derivatives(c: &ParametricCurve, p: Point2, t: f64) -> [(f64, f64); 3] {
    let d = c.position(t) - p;
    let s1 = c.derivative(1, t);
    let s2 = c.derivative(2, t);
    let s3 = c.derivative(3, t);
    let s4 = c.derivative(4, t);
    let dn = d.norm();
    [
        (d.dot(s2) + s1.norm_sq(), dn * s2.norm() + s1.norm_sq()),
        (
            d.dot(s3) + 3.0 * s1.dot(s2),
            dn * s3.norm() + 3.0 * s1.norm() * s2.norm(),
        ),
        (
            d.dot(s4) + 4.0 * s1.dot(s3) + 3.0 * s2.norm_sq(),
            dn * s4.norm() + 4.0 * s1.norm() * s3.norm() + 3.0 * s2.norm_sq(),
        ),
    ]
}

fn zero_tolerance(c: &ParametricCurve, order: u8) -> f64 {
    let sampled = matches!(c.shape(), Shape::Sampled(_));
    match (sampled, order) {
        (false, 2) => 1e-9,
        (false, _) => 1e-7,
        (true, 2) => 1e-6,
        (true, _) => 1e-3,
    }
}

/// Classifies a stationary point of the distance by the sign and order of
/// the lowest non-vanishing derivative of `phi`.
pub fn classify_stationary(c: &ParametricCurve, p: Point2, t: f64) -> (FootKind, u8) {
    for (k, (value, scale)) in phi_derivatives(c, p, t).into_iter().enumerate() {
        let order = k as u8 + 2;
        if value.abs() <= zero_tolerance(c, order) * scale {
            continue;
        }
        return match (order % 2 == 0, value > 0.0) {
            (true, true) => (FootKind::LocalMin, order),
            (true, false) => (FootKind::LocalMax, order),
            (false, _) => (FootKind::Degenerate, order),
        };
    }
    (FootKind::Degenerate, FLAT_ORDER)
}

fn make_foot(c: &ParametricCurve, p: Point2, t: f64) -> Foot {
    let point = c.position(t);
    let (kind, order) = classify_stationary(c, p, t);
    Foot {
        t,
        point,
        distance: point.distance(p),
        kind,
        order,
        boundary: false,
        arc: None,
    }
}

/// Endpoint foot of an open curve, or `None` when the distance decreases
/// into the domain (a one-sided maximum).
fn endpoint_foot(c: &ParametricCurve, p: Point2, t: f64, at_start: bool) -> Option<Foot> {
    let r = residual(c, p, t);
    let scale = c.speed(t) * c.diameter();
    if r.abs() <= 1e-12 * scale {
        return None;
    }
    let increasing_inward = if at_start { r > 0.0 } else { r < 0.0 };
    if !increasing_inward {
        return None;
    }
    let point = c.position(t);
    Some(Foot {
        t,
        point,
        distance: point.distance(p),
        kind: FootKind::LocalMin,
        order: 1,
        boundary: true,
        arc: None,
    })
}

fn parameter_tolerance(c: &ParametricCurve) -> f64 {
    1e-12 * c.domain_length().max(1.0)
}

fn refine_bracket(c: &ParametricCurve, p: Point2, a: f64, b: f64) -> Result<f64> {
    let root = safeguarded_newton(
        |t| residual_and_slope(c, p, t),
        a,
        b,
        parameter_tolerance(c),
        MAX_ITERATIONS,
    );
    if root.converged {
        Ok(root.x)
    } else {
        Err(Error::NoConvergence {
            iterations: root.iterations,
            last_t: root.x,
        })
    }
}

/// Refines a foot of `p` starting from `t_seed`.
///
/// The nearest sign change of the residual around the seed is bracketed by
/// a geometric search and then solved by Newton iteration with a bisection
/// safeguard.
pub fn foot_refine(c: &ParametricCurve, p: Point2, t_seed: f64) -> Result<Foot> {
    let (lo, hi) = c.domain();
    if !c.is_closed() && !(lo..=hi).contains(&t_seed) {
        return Err(Error::OutOfDomain { t: t_seed });
    }
    let t0 = c.wrap(t_seed);
    let (r0, slope0) = residual_and_slope(c, p, t0);
    let scale = c.speed(t0) * c.diameter();
    if r0.abs() <= 1e-14 * scale {
        return Ok(make_foot(c, p, t0));
    }
    let len = c.domain_length();
    let limit = if c.is_closed() { 0.5 * len } else { len };
    let mut h = 1e-4 * len;
    // Newton's preferred direction, used to break ties between two brackets
    let forward = slope0 != 0.0 && -r0 / slope0 > 0.0;
    while h <= limit {
        let left = if c.is_closed() { t0 - h } else { (t0 - h).max(lo) };
        let right = if c.is_closed() { t0 + h } else { (t0 + h).min(hi) };
        let rl = residual(c, p, left);
        let rr = residual(c, p, right);
        let left_change = left < t0 && rl.signum() != r0.signum();
        let right_change = right > t0 && rr.signum() != r0.signum();
        let bracket = match (left_change, right_change) {
            (true, true) if forward => Some((t0, right)),
            (true, _) => Some((left, t0)),
            (false, true) => Some((t0, right)),
            (false, false) => None,
        };
        if let Some((a, b)) = bracket {
            let t = refine_bracket(c, p, a, b)?;
            return Ok(make_foot(c, p, c.wrap(t)));
        }
        if !c.is_closed() && left <= lo && right >= hi {
            break;
        }
        h *= 2.0;
    }
    if !c.is_closed() {
        // the distance keeps decreasing towards an end of the domain
        let t = if r0 > 0.0 { lo } else { hi };
        return Err(Error::OutOfDomain { t });
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        last_t: t0,
    })
}

/// Finds every foot of `p` on `c`.
///
/// The residual is scanned on a uniform grid of `n_scan` intervals; every
/// sign change is refined, endpoint minima of open curves are appended, and
/// feet closer than `1e-6` of the domain length are merged. A distance
/// profile that is constant to `1e-9` relative is reported as a single flat
/// foot covering the whole curve.
pub fn all_feet(c: &ParametricCurve, p: Point2, n_scan: usize) -> FootSet {
    let n = n_scan.max(64);
    let (lo, hi) = c.domain();
    let mut ts = c.grid(n);
    if c.is_closed() {
        ts.push(hi);
    }
    let positions: Vec<Point2> = ts.iter().map(|&t| c.position(t)).collect();
    let dists: Vec<f64> = positions.iter().map(|q| q.distance(p)).collect();
    let (dmin, dmax, dsum) = dists
        .iter()
        .fold((f64::INFINITY, 0.0f64, 0.0), |(a, b, s), &d| (a.min(d), b.max(d), s + d));
    let mean = dsum / dists.len() as f64;
    if dmax - dmin <= CONSTANT_PROFILE * mean {
        return FootSet {
            feet: vec![Foot {
                t: lo,
                point: positions[0],
                distance: mean,
                kind: FootKind::Degenerate,
                order: FLAT_ORDER,
                boundary: false,
                arc: Some((lo, hi)),
            }],
            warnings: 0,
        };
    }

    let mut res: Vec<f64> = ts
        .iter()
        .zip(&positions)
        .map(|(&t, &q)| (q - p).dot(c.derivative(1, t)))
        .collect();
    if c.is_closed() {
        // the seam is one point; separate roundoff at both ends could hide a root there
        let last = res.len() - 1;
        res[last] = res[0];
    }
    let mut candidates: Vec<f64> = Vec::new();
    let mut warnings = 0;
    for i in 0..ts.len() - 1 {
        if res[i] == 0.0 {
            candidates.push(ts[i]);
        } else if res[i].signum() != res[i + 1].signum() && res[i + 1] != 0.0 {
            match refine_bracket(c, p, ts[i], ts[i + 1]) {
                Ok(t) => candidates.push(c.wrap(t)),
                // roundoff at the seam of a closed curve
                Err(_) if c.is_closed() && i + 2 == ts.len() => candidates.push(lo),
                Err(_) => warnings += 1,
            }
        }
    }
    if !c.is_closed() && res[ts.len() - 1] == 0.0 {
        candidates.push(hi);
    }

    let mut feet: Vec<Foot> = Vec::with_capacity(candidates.len() + 2);
    let length_tol = 1e-8 * c.diameter();
    for t in candidates {
        let foot = make_foot(c, p, t);
        let speed = c.speed(t);
        let normal_residual = residual(c, p, t).abs() / speed;
        if normal_residual > length_tol {
            warnings += 1;
            continue;
        }
        feet.push(foot);
    }
    if !c.is_closed() {
        feet.extend(endpoint_foot(c, p, lo, true));
        feet.extend(endpoint_foot(c, p, hi, false));
    }

    let merge = MERGE_FRACTION * c.domain_length();
    feet.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut merged: Vec<Foot> = Vec::with_capacity(feet.len());
    for f in feet {
        match merged.last_mut() {
            Some(last) if c.param_delta(last.t, f.t).abs() < merge => {
                if f.distance < last.distance {
                    *last = f;
                }
            }
            _ => merged.push(f),
        }
    }
    if c.is_closed() && merged.len() > 1 {
        let first_t = merged[0].t;
        let last = merged.last().unwrap();
        if c.param_delta(last.t, first_t).abs() < merge {
            let last = merged.pop().unwrap();
            if last.distance < merged[0].distance {
                merged[0] = last;
            }
        }
    }
    merged.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.t.total_cmp(&b.t)));
    FootSet {
        feet: merged,
        warnings,
    }
}
