//! Evolutes: centers of osculating circles, vertices and evolute cusps.

use crate::curve::ParametricCurve;
use crate::geometry::Point2;
use crate::numeric::bisect;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CuspKind {
    MaxCurvature,
    MinCurvature,
}

impl CuspKind {
    pub fn name(self) -> &'static str {
        match self {
            CuspKind::MaxCurvature => "max",
            CuspKind::MinCurvature => "min",
        }
    }
}

/// A vertex of the curve, i.e. a cusp of its evolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvoluteCusp {
    pub t: f64,
    pub center: Point2,
    pub radius: f64,
    pub kind: CuspKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactOrder {
    Second,
    ThirdOrHigher,
}

fn zero_curvature_threshold(c: &ParametricCurve) -> f64 {
    1e-9 / c.diameter()
}

/// Center of the osculating circle at `t`.
pub fn evolute_point(c: &ParametricCurve, t: f64) -> Result<Point2> {
    let k = c.signed_curvature(t)?;
    if k.abs() < zero_curvature_threshold(c) {
        return Err(Error::ZeroCurvature { t });
    }
    Ok(c.position(t) + c.left_normal(t)? / k)
}

/// Rate of change of curvature per unit arc length.
fn arc_rate(c: &ParametricCurve, t: f64) -> Result<f64> {
    Ok(c.curvature_derivative(t)? / c.speed(t))
}

fn is_vertex(c: &ParametricCurve, t: f64) -> Result<bool> {
    let k = c.signed_curvature(t)?;
    let d = c.diameter();
    let scale = (k * k).max(1.0 / (d * d));
    Ok(arc_rate(c, t)?.abs() <= 1e-8 * scale)
}

/// Order of contact between the curve and its osculating circle at `t`:
/// at least third order exactly at vertices.
pub fn osculating_contact_order(c: &ParametricCurve, t: f64) -> Result<ContactOrder> {
    Ok(if is_vertex(c, t)? {
        ContactOrder::ThirdOrHigher
    } else {
        ContactOrder::Second
    })
}

/// Locates the vertices of `c` (zeros of the curvature derivative) by a grid
/// scan with bisection and labels them by whether `|kappa|` peaks or dips.
///
/// Constant-curvature curves have no isolated vertices and yield an empty
/// list; vertices at vanishing curvature are skipped because their evolute
/// point is at infinity.
pub fn find_cusps(c: &ParametricCurve, n_scan: usize) -> Result<Vec<EvoluteCusp>> {
    let n = n_scan.max(64);
    let mut ts = c.grid(n);
    if c.is_closed() {
        ts.push(c.domain().1);
    }
    let kappa: Vec<f64> = ts.iter().map(|&t| c.signed_curvature(t)).collect::<Result<_>>()?;
    let (kmin, kmax) = kappa
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &k| (a.min(k), b.max(k)));
    let kabs = kmax.abs().max(kmin.abs()).max(1.0 / c.diameter());
    if kmax - kmin <= 1e-9 * kabs {
        return Ok(Vec::new());
    }
    let mut rate: Vec<f64> = ts.iter().map(|&t| c.curvature_derivative(t)).collect::<Result<_>>()?;
    if c.is_closed() {
        let last = rate.len() - 1;
        rate[last] = rate[0];
    }
    let tol = 1e-13 * c.domain_length().max(1.0);
    let mut roots = Vec::new();
    for i in 0..ts.len() - 1 {
        let (a, b) = (rate[i], rate[i + 1]);
        if a == 0.0 {
            roots.push(ts[i]);
        } else if b != 0.0 && a.signum() != b.signum() {
            let r = bisect(|t| c.curvature_derivative(t).unwrap_or(0.0), ts[i], ts[i + 1], tol, 200);
            roots.push(r.x);
        }
    }
    if !c.is_closed() {
        // open-curve endpoints are not vertices
        let (lo, hi) = c.domain();
        roots.retain(|&t| t > lo && t < hi);
    }
    let h = c.domain_length() / (8.0 * n as f64);
    let mut cusps = Vec::with_capacity(roots.len());
    for t in roots {
        let t = c.wrap(t);
        let k = c.signed_curvature(t)?;
        if k.abs() < zero_curvature_threshold(c) {
            continue;
        }
        let side = |s: f64| -> Result<f64> { Ok(c.signed_curvature(c.wrap(s))?.abs()) };
        let (left, right) = (side(t - h)?, side(t + h)?);
        let here = k.abs();
        let kind = if here >= left && here >= right {
            CuspKind::MaxCurvature
        } else if here <= left && here <= right {
            CuspKind::MinCurvature
        } else {
            // curvature keeps increasing through a flat point: not an extremum
            continue;
        };
        cusps.push(EvoluteCusp {
            t,
            center: evolute_point(c, t)?,
            radius: 1.0 / here,
            kind,
        });
    }
    let merge = 1e-9 * c.domain_length();
    cusps.sort_by(|a, b| a.t.total_cmp(&b.t));
    cusps.dedup_by(|b, a| c.param_delta(a.t, b.t).abs() < merge);
    if c.is_closed() && cusps.len() > 1 {
        let first = cusps[0].t;
        if c.param_delta(cusps[cusps.len() - 1].t, first).abs() < merge {
            cusps.pop();
        }
    }
    Ok(cusps)
}

/// Samples the evolute on `n` grid points, splitting into separate
/// polylines where the curvature vanishes or the evolute leaves `bound`
/// (a radius around the origin).
pub fn evolute_polylines(c: &ParametricCurve, n: usize, bound: f64) -> Vec<Vec<Point2>> {
    let mut ts = c.grid(n);
    if c.is_closed() {
        ts.push(c.domain().1);
    }
    let mut lines = Vec::new();
    let mut current: Vec<Point2> = Vec::new();
    for t in ts {
        match evolute_point(c, t) {
            Ok(q) if q.norm() <= bound => current.push(q),
            _ => {
                if current.len() > 1 {
                    lines.push(std::mem::take(&mut current));
                }
                current.clear();
            }
        }
    }
    if current.len() > 1 {
        lines.push(current);
    }
    lines
}
