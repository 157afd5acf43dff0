//! Contact disks and the Divider set.
//!
//! For a curve point `S(t1)` and a normal side `N`, the disks tangent at
//! `S(t1)` with centers `S(t1) + r N` are linearly ordered by inclusion. The
//! supremum radius among those meeting the curve only at `S(t1)` is the
//! contact radius; its inverse is the contact curvature, and the centers of
//! the supremum disks form the Divider.
//!
//! The circle tangent at `S(t1)` on side `N` and passing through `S(t)` has
//! radius `rho(t) = |S(t) - S(t1)|^2 / (2 N . (S(t) - S(t1)))`. A disk of
//! radius `r` contains `S(t)` exactly when `r > rho(t)`, so the contact
//! radius is the infimum of `rho` over the curve, with the limit
//! `rho(t) -> 1 / kappa` as `t -> t1`.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::curve::ParametricCurve;
use crate::evolute::{evolute_point, find_cusps, CuspKind};
use crate::foot::{classify_stationary, foot_refine, residual, FootKind};
use crate::geometry::Point2;
use crate::lclt::lclt_curvature;
use crate::numeric::brent_minimize;
use crate::{Error, Result, DEFAULT_N_SCAN};

/// Fraction of the domain length under which two feet count as one.
pub const MERGE_FRACTION: f64 = 1e-4;
/// Radius, relative to the curve diameter, below which a Divider point is a
/// zero-radius point.
pub const ZERO_RADIUS: f64 = 1e-6;
/// Relative distance under which Divider centers are clustered.
pub const CLUSTER_RADIUS: f64 = 1e-6;
/// Relative radius of the neighbourhood searched by [`divider_validate`].
pub const CLOSURE_RADIUS: f64 = 1e-4;

const NEWTON_ITERATIONS: usize = 50;
const EXCLUDE_FRACTION: f64 = 1e-6;
const MAX_VALLEYS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    LeftNormal,
    RightNormal,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::LeftNormal, Side::RightNormal];

    pub fn sign(self) -> f64 {
        match self {
            Side::LeftNormal => 1.0,
            Side::RightNormal => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::LeftNormal => "left",
            Side::RightNormal => "right",
        }
    }

    fn normal(self, c: &ParametricCurve, t: f64) -> Result<Point2> {
        Ok(c.left_normal(t)? * self.sign())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left" | "l" => Ok(Side::LeftNormal),
            "right" | "r" => Ok(Side::RightNormal),
            other => Err(Error::Parse(format!("unknown side `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactDisk {
    pub t1: f64,
    pub side: Side,
    /// `S(t1) + radius N`; equal to `S(t1)` when the radius is infinite.
    pub center: Point2,
    pub radius: f64,
    /// Parameter of the second contact, absent for osculating and infinite
    /// disks.
    pub second_foot: Option<f64>,
    /// Every parameter at which the supremum disk touches the curve.
    pub contacts: Vec<f64>,
    /// The supremum is the osculating disk.
    pub osculating: bool,
    /// The curve is a circle around the center: every point is a contact.
    pub flat: bool,
}

impl ContactDisk {
    pub fn is_finite(&self) -> bool {
        self.radius.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DividerKind {
    Regular,
    Endpoint,
    ZeroRadius,
}

impl DividerKind {
    pub fn name(self) -> &'static str {
        match self {
            DividerKind::Regular => "regular",
            DividerKind::Endpoint => "endpoint",
            DividerKind::ZeroRadius => "zero_radius",
        }
    }

    fn priority(self) -> u8 {
        match self {
            DividerKind::ZeroRadius => 0,
            DividerKind::Endpoint => 1,
            DividerKind::Regular => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DividerPoint {
    pub center: Point2,
    pub radius: f64,
    pub t1: f64,
    pub t2: f64,
    pub side: Side,
    pub kind: DividerKind,
    /// Normality at `t1`, normality at `t2`, and equal distances, all in
    /// length units.
    pub residuals: [f64; 3],
    /// Curve parameters of all contacts, sorted.
    pub feet: Vec<f64>,
    /// `t2` is an endpoint of an open curve, where normality is not
    /// required.
    pub boundary_foot: bool,
    /// The disk touches a whole circular arc.
    pub flat: bool,
}

impl DividerPoint {
    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a: f64, &b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DividerConfig {
    pub n_scan: usize,
    pub n_grid: usize,
    /// Search ceiling for contact radii, in curve diameters.
    pub r_max_factor: f64,
    pub sides: Vec<Side>,
}

impl Default for DividerConfig {
    fn default() -> Self {
        DividerConfig {
            n_scan: DEFAULT_N_SCAN,
            n_grid: 1024,
            r_max_factor: 10.0,
            sides: Side::BOTH.to_vec(),
        }
    }
}

/// Contact radius at `t1` with the default scan density and ceiling.
pub fn contact_radius(c: &ParametricCurve, t1: f64, side: Side) -> Result<ContactDisk> {
    let cfg = DividerConfig::default();
    contact_radius_with(c, t1, side, cfg.n_scan, cfg.r_max_factor * c.diameter())
}

/// Supremum contact disk at `t1` on `side`.
///
/// `rho` is scanned on `n_scan` grid intervals; its lowest valleys are
/// refined with Brent's method and compared with the osculating radius.
/// Radii above `r_max` are reported as infinite.
pub fn contact_radius_with(
    c: &ParametricCurve,
    t1: f64,
    side: Side,
    n_scan: usize,
    r_max: f64,
) -> Result<ContactDisk> {
    let normal = side.normal(c, t1)?;
    let kappa = side.sign() * c.signed_curvature(t1)?;
    let diameter = c.diameter();
    let r_curv = if kappa > 1e-12 / diameter {
        1.0 / kappa
    } else {
        f64::INFINITY
    };
    let s1 = c.position(t1);
    let len = c.domain_length();
    let exclude = EXCLUDE_FRACTION * len;
    let cap = 1e100 * diameter;
    let rho = |t: f64| -> f64 {
        if c.param_delta(t1, t).abs() <= exclude {
            return r_curv.min(cap);
        }
        let delta = c.position(t) - s1;
        let nd = normal.dot(delta);
        if nd > 0.0 {
            (delta.norm_sq() / (2.0 * nd)).min(cap)
        } else {
            cap
        }
    };
    let mut ts = c.grid(n_scan.max(64));
    if !c.is_closed() {
        // keep both ends, already present in the open grid
    }
    ts.retain(|&t| c.param_delta(t1, t).abs() > exclude);
    let values: Vec<f64> = ts.iter().map(|&t| rho(t)).collect();
    let m = values.len();
    let infinite = ContactDisk {
        t1,
        side,
        center: s1,
        radius: f64::INFINITY,
        second_foot: None,
        contacts: vec![t1],
        osculating: false,
        flat: false,
    };

    // a circle seen from its own center
    let flat_tol = 1e-9 * r_curv;
    if r_curv.is_finite() && values.iter().all(|&v| (v - r_curv).abs() <= flat_tol) {
        return Ok(ContactDisk {
            t1,
            side,
            center: s1 + normal * r_curv,
            radius: r_curv,
            second_foot: None,
            contacts: vec![t1],
            osculating: true,
            flat: true,
        });
    }

    // local minima of the sampled profile, cyclic on closed curves
    let step = len / n_scan.max(64) as f64;
    let mut valleys: Vec<(f64, usize)> = (0..m)
        .filter(|&i| {
            let v = values[i];
            if v >= cap {
                return false;
            }
            let prev = if i > 0 {
                Some(values[i - 1])
            } else if c.is_closed() {
                Some(values[m - 1])
            } else {
                None
            };
            let next = if i + 1 < m {
                Some(values[i + 1])
            } else if c.is_closed() {
                Some(values[0])
            } else {
                None
            };
            prev.map_or(true, |p| v <= p) && next.map_or(true, |n| v < n)
        })
        .map(|i| (values[i], i))
        .collect();
    valleys.sort_by(|a, b| a.0.total_cmp(&b.0));
    valleys.truncate(MAX_VALLEYS);

    let (lo, hi) = c.domain();
    let mut refined: Vec<(f64, f64)> = valleys
        .iter()
        .map(|&(_, i)| {
            let t = ts[i];
            let (mut a, mut b) = (t - step, t + step);
            if !c.is_closed() {
                a = a.max(lo);
                b = b.min(hi);
            }
            let (x, fx) = brent_minimize(rho, a, b, 1e-13 * len.max(1.0), 200);
            // Brent never evaluates the bracket ends; open-curve ends are
            // legitimate contacts
            let candidates = [(x, fx), (a, rho(a)), (b, rho(b))];
            let best = candidates
                .into_iter()
                .filter(|&(s, _)| c.is_closed() || (s >= lo && s <= hi))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            (c.wrap(best.0), best.1.min(values[i]))
        })
        .collect();
    refined.sort_by(|a, b| a.1.total_cmp(&b.1));

    let merge = MERGE_FRACTION * len;
    let best = refined.first().copied();
    let (radius, second, osculating) = match best {
        Some((t2, r)) if r < r_curv && c.param_delta(t1, t2).abs() > merge => (r, Some(t2), false),
        _ => (r_curv, None, true),
    };
    if !(radius <= r_max) {
        return Ok(infinite);
    }
    let mut contacts = vec![t1];
    if let Some(t2) = second {
        let tie = 1e-9 * diameter.max(radius);
        for &(t, r) in &refined {
            if r - radius <= tie && !contacts.iter().any(|&s| c.param_delta(s, t).abs() <= merge) {
                contacts.push(t);
            }
        }
        debug_assert!(contacts.iter().any(|&s| s == t2));
    }
    contacts.sort_by(f64::total_cmp);
    Ok(ContactDisk {
        t1,
        side,
        center: s1 + normal * radius,
        radius,
        second_foot: second,
        contacts,
        osculating,
        flat: false,
    })
}

/// Normality residuals at both feet and the distance mismatch, in length
/// units.
pub fn residuals(c: &ParametricCurve, center: Point2, t1: f64, t2: f64) -> [f64; 3] {
    let s1 = c.position(t1);
    let s2 = c.position(t2);
    [
        residual(c, center, t1).abs() / c.speed(t1),
        residual(c, center, t2).abs() / c.speed(t2),
        (s1.distance(center) - s2.distance(center)).abs(),
    ]
}

fn seed_from_disk(disk: &ContactDisk, c: &ParametricCurve) -> DividerPoint {
    let zero = ZERO_RADIUS * c.diameter();
    let (t2, kind) = match disk.second_foot {
        Some(t2) if disk.radius < zero => (t2, DividerKind::ZeroRadius),
        Some(t2) => (t2, DividerKind::Regular),
        None if disk.flat => (c.wrap(disk.t1 + 0.5 * c.domain_length()), DividerKind::Regular),
        None => (disk.t1, DividerKind::Endpoint),
    };
    DividerPoint {
        center: disk.center,
        radius: disk.radius,
        t1: disk.t1,
        t2,
        side: disk.side,
        kind,
        residuals: [f64::NAN; 3],
        feet: disk.contacts.clone(),
        boundary_foot: false,
        flat: disk.flat,
    }
}

fn certify(c: &ParametricCurve, center: Point2, t: f64, boundary: bool) -> Result<()> {
    if boundary {
        let (lo, _) = c.domain();
        let r = residual(c, center, t);
        let scale = c.speed(t) * c.diameter();
        if r.abs() > 1e-9 * scale {
            let inward_increasing = if t == lo { r > 0.0 } else { r < 0.0 };
            return if inward_increasing {
                Ok(())
            } else {
                Err(Error::CertificationFailure {
                    t,
                    kind: "one-sided maximum".into(),
                })
            };
        }
    }
    match classify_stationary(c, center, t) {
        (FootKind::LocalMin, _) => Ok(()),
        (FootKind::Degenerate, order) if order >= crate::foot::FLAT_ORDER => Ok(()),
        (kind, order) => Err(Error::CertificationFailure {
            t,
            kind: format!("{} of order {order}", kind.name()),
        }),
    }
}

fn finish(c: &ParametricCurve, mut p: DividerPoint) -> Result<DividerPoint> {
    p.residuals = if p.boundary_foot {
        let r = residuals(c, p.center, p.t1, p.t2);
        [r[0], 0.0, r[2]]
    } else {
        residuals(c, p.center, p.t1, p.t2)
    };
    if !p.flat {
        certify(c, p.center, p.t1, false)?;
        certify(c, p.center, p.t2, p.boundary_foot)?;
    }
    if p.kind == DividerKind::Regular && p.radius < ZERO_RADIUS * c.diameter() {
        p.kind = DividerKind::ZeroRadius;
    }
    if p.kind != DividerKind::Endpoint {
        let merge = MERGE_FRACTION * c.domain_length();
        let t2 = p.t2;
        p.feet.retain(|&s| c.param_delta(s, t2).abs() > merge);
        p.feet.push(t2);
        p.feet.sort_by(f64::total_cmp);
    }
    Ok(p)
}

/// Solves the defining system for the unknowns `(t2, x10, x20)` with `t1`
/// fixed: normality of the segment at `S(t1)` and at `S(t2)`, and equal
/// distances. Both feet are then certified as local minima of the distance
/// (falling back to higher derivatives when the second one vanishes).
///
/// Endpoint seeds are the osculating center at `t1`; zero-radius seeds are
/// self-intersections, refined as the foot of `S(t1)` on the other branch.
pub fn newton_polish(c: &ParametricCurve, seed: &DividerPoint) -> Result<DividerPoint> {
    let diameter = c.diameter();
    let mut p = seed.clone();
    if p.flat {
        p.center = evolute_point(c, p.t1)?;
        p.radius = c.position(p.t1).distance(p.center);
        return finish(c, p);
    }
    match p.kind {
        DividerKind::Endpoint => {
            p.center = evolute_point(c, p.t1)?;
            p.radius = 1.0 / c.signed_curvature(p.t1)?.abs();
            p.t2 = p.t1;
            return finish(c, p);
        }
        DividerKind::ZeroRadius => {
            let s1 = c.position(p.t1);
            let foot = foot_refine(c, s1, p.t2)?;
            p.t2 = foot.t;
            p.center = (s1 + foot.point) * 0.5;
            p.radius = 0.5 * foot.distance;
            if p.radius < ZERO_RADIUS * diameter {
                return finish(c, p);
            }
            p.kind = DividerKind::Regular;
        }
        DividerKind::Regular => {}
    }

    let t1 = p.t1;
    let (lo, hi) = c.domain();
    let s1 = c.position(t1);
    let d1 = c.derivative(1, t1);
    let mut t2 = p.t2;
    let mut center = p.center;
    let scaled = |t2: f64, center: Point2| -> f64 {
        let r = residuals(c, center, t1, t2);
        r[0].max(r[1]).max(r[2])
    };
    let mut current = scaled(t2, center);
    let mut boundary = false;
    for _ in 0..NEWTON_ITERATIONS {
        if current <= 1e-14 * diameter {
            break;
        }
        let s2 = c.position(t2);
        let e1 = c.derivative(1, t2);
        let e2 = c.derivative(2, t2);
        let f = Vector3::new(
            (s1 - center).dot(d1),
            (s2 - center).dot(e1),
            (s1 - center).norm_sq() - (s2 - center).norm_sq(),
        );
        let j = Matrix3::new(
            0.0, -d1.x1, -d1.x2,
            e1.norm_sq() + (s2 - center).dot(e2), -e1.x1, -e1.x2,
            -2.0 * (s2 - center).dot(e1), 2.0 * (s2.x1 - s1.x1), 2.0 * (s2.x2 - s1.x2),
        );
        let Some(step) = j.lu().solve(&f) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let nt = t2 - lambda * step[0];
            let nc = center - Point2::new(step[1], step[2]) * lambda;
            if !c.is_closed() && (nt < lo || nt > hi) {
                boundary = true;
                break;
            }
            let value = scaled(nt, nc);
            if value < current || value <= 1e-14 * diameter {
                t2 = nt;
                center = nc;
                current = value;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if boundary || !accepted {
            break;
        }
    }
    if boundary {
        // the second contact sits on an end of an open curve: only the
        // radius along the normal at t1 remains free
        t2 = if (t2 - lo).abs() < (t2 - hi).abs() { lo } else { hi };
        let normal = p.side.normal(c, t1)?;
        let delta = c.position(t2) - s1;
        let nd = normal.dot(delta);
        if nd <= 0.0 {
            return Err(Error::NoConvergence {
                iterations: NEWTON_ITERATIONS,
                last_t: t2,
            });
        }
        let r = delta.norm_sq() / (2.0 * nd);
        center = s1 + normal * r;
        p.boundary_foot = true;
    } else if current > 1e-12 * diameter {
        return Err(Error::NoConvergence {
            iterations: NEWTON_ITERATIONS,
            last_t: t2,
        });
    }
    if c.param_delta(t1, t2).abs() <= MERGE_FRACTION * c.domain_length() {
        return Err(Error::NoConvergence {
            iterations: NEWTON_ITERATIONS,
            last_t: t2,
        });
    }
    p.t2 = c.wrap(t2);
    p.center = center;
    p.radius = s1.distance(center);
    finish(c, p)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GapReason {
    /// No second contact below the radius ceiling.
    Unbounded,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub t1: f64,
    pub side: Side,
    pub reason: GapReason,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DividerTrace {
    /// Sorted by side, then `t1`; zero-radius points carry the left side.
    pub points: Vec<DividerPoint>,
    /// Indices into `points`, each a chain of neighbouring centers.
    pub polylines: Vec<Vec<usize>>,
    pub gaps: Vec<Gap>,
    /// Centers where three or more distinct contacts meet.
    pub junctions: Vec<usize>,
}

impl DividerTrace {
    pub fn count(&self, kind: DividerKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }
}

/// Transversal self-intersections as parameter pairs `(ta, tb)`, `ta < tb`,
/// located on an `n`-segment polyline and refined by Newton's method on
/// `S(ta) = S(tb)`.
pub fn self_intersections(c: &ParametricCurve, n: usize) -> Vec<(f64, f64)> {
    let mut ts = c.grid(n);
    if c.is_closed() {
        ts.push(c.domain().1);
    }
    let pts: Vec<Point2> = ts.iter().map(|&t| c.position(t)).collect();
    let segs = pts.len() - 1;
    let boxes: Vec<[f64; 4]> = (0..segs)
        .map(|i| {
            let (a, b) = (pts[i], pts[i + 1]);
            [a.x1.min(b.x1), a.x2.min(b.x2), a.x1.max(b.x1), a.x2.max(b.x2)]
        })
        .collect();
    let mut found: Vec<(f64, f64)> = Vec::new();
    let merge = MERGE_FRACTION * c.domain_length();
    for i in 0..segs {
        for j in i + 2..segs {
            if c.is_closed() && i == 0 && j == segs - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[2] < bj[0] || bj[2] < bi[0] || bi[3] < bj[1] || bj[3] < bi[1] {
                continue;
            }
            let Some((u, v)) = segment_intersection(pts[i], pts[i + 1], pts[j], pts[j + 1]) else {
                continue;
            };
            let ta = ts[i] + u * (ts[i + 1] - ts[i]);
            let tb = ts[j] + v * (ts[j + 1] - ts[j]);
            if let Some((a, b)) = refine_crossing(c, ta, tb) {
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                if c.param_delta(a, b).abs() <= merge {
                    continue;
                }
                let dup = found.iter().any(|&(x, y)| {
                    c.param_delta(x, a).abs() <= merge && c.param_delta(y, b).abs() <= merge
                });
                if !dup {
                    found.push((a, b));
                }
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found
}

fn segment_intersection(a: Point2, b: Point2, p: Point2, q: Point2) -> Option<(f64, f64)> {
    let r = b - a;
    let s = q - p;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let u = (p - a).cross(s) / denom;
    let v = (p - a).cross(r) / denom;
    ((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)).then_some((u, v))
}

fn refine_crossing(c: &ParametricCurve, mut ta: f64, mut tb: f64) -> Option<(f64, f64)> {
    let tol = 1e-13 * c.diameter();
    for _ in 0..40 {
        let f = c.position(ta) - c.position(tb);
        if f.norm() <= tol {
            return Some((c.wrap(ta), c.wrap(tb)));
        }
        let da = c.derivative(1, ta);
        let db = c.derivative(1, tb);
        // J = [da, -db]
        let det = -da.cross(db);
        if det.abs() < 1e-300 {
            return None;
        }
        let dta = (f.x1 * -db.x2 - -db.x1 * f.x2) / det;
        let dtb = (da.x1 * f.x2 - da.x2 * f.x1) / det;
        ta -= dta;
        tb -= dtb;
        if !c.is_closed() {
            let (lo, hi) = c.domain();
            if ta < lo || ta > hi || tb < lo || tb > hi {
                return None;
            }
        }
    }
    let f = c.position(ta) - c.position(tb);
    (f.norm() <= 1e3 * tol).then(|| (c.wrap(ta), c.wrap(tb)))
}

/// Traces the Divider: for every `t1` on an `n_grid` grid (plus the
/// maximum-curvature vertices) and every requested side, the supremum
/// contact disk is found and Newton-polished. Self-intersections add
/// zero-radius points. Centers closer than `1e-6` of the diameter are
/// merged, and chains of neighbouring centers are grouped into polylines,
/// split where a jump exceeds ten times the local spacing.
pub fn divider_trace(c: &ParametricCurve, cfg: &DividerConfig) -> Result<DividerTrace> {
    let diameter = c.diameter();
    let r_max = cfg.r_max_factor * diameter;
    let mut t1s = c.grid(cfg.n_grid.max(16));
    let merge = MERGE_FRACTION * c.domain_length();
    for cusp in find_cusps(c, cfg.n_scan)? {
        if cusp.kind == CuspKind::MaxCurvature && !t1s.iter().any(|&t| c.param_delta(t, cusp.t).abs() <= 1e-12) {
            t1s.push(cusp.t);
        }
    }
    t1s.sort_by(f64::total_cmp);

    let mut points: Vec<DividerPoint> = Vec::new();
    // per side, the index into `points` of each t1 sample
    let mut slots: Vec<Vec<Option<usize>>> = Vec::new();
    let mut gaps = Vec::new();
    let mut sides = cfg.sides.clone();
    sides.sort();
    sides.dedup();
    for &side in &sides {
        let results: Vec<std::result::Result<DividerPoint, GapReason>> = t1s
            .par_iter()
            .map(|&t1| {
                let disk = contact_radius_with(c, t1, side, cfg.n_scan, r_max)
                    .map_err(|e| GapReason::Failed(e.to_string()))?;
                if !disk.is_finite() {
                    return Err(GapReason::Unbounded);
                }
                newton_polish(c, &seed_from_disk(&disk, c)).map_err(|e| GapReason::Failed(e.to_string()))
            })
            .collect();
        let mut slot = Vec::with_capacity(t1s.len());
        for (&t1, r) in t1s.iter().zip(results) {
            match r {
                Ok(p) => {
                    slot.push(Some(points.len()));
                    points.push(p);
                }
                Err(reason) => {
                    slot.push(None);
                    gaps.push(Gap { t1, side, reason });
                }
            }
        }
        slots.push(slot);
    }

    for (ta, tb) in self_intersections(c, 4 * cfg.n_grid.max(16)) {
        let seed = DividerPoint {
            center: c.position(ta),
            radius: 0.0,
            t1: ta,
            t2: tb,
            side: Side::LeftNormal,
            kind: DividerKind::ZeroRadius,
            residuals: [f64::NAN; 3],
            feet: vec![ta, tb],
            boundary_foot: false,
            flat: false,
        };
        if let Ok(p) = newton_polish(c, &seed) {
            points.push(p);
        }
    }

    // cluster coincident centers, keeping the most specific kind
    let keep = cluster(&mut points, CLUSTER_RADIUS * diameter, merge, c);
    let mut remap = vec![None; points.len()];
    let mut kept = Vec::new();
    for (i, p) in points.into_iter().enumerate() {
        if keep[i] == Some(i) {
            remap[i] = Some(kept.len());
            kept.push(p);
        }
    }
    let slots: Vec<Vec<Option<usize>>> = slots
        .into_iter()
        .map(|s| s.into_iter().map(|o| o.and_then(|i| if keep[i] == Some(i) { remap[i] } else { None })).collect())
        .collect();

    let mut polylines = Vec::new();
    for slot in &slots {
        polylines.extend(chain(slot, &kept, c.is_closed(), diameter));
    }

    // final order: side, then t1, with polyline indices remapped
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&kept[a], &kept[b]);
        p.side.cmp(&q.side).then(p.t1.total_cmp(&q.t1))
    });
    let mut position = vec![0; kept.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let points: Vec<DividerPoint> = order.iter().map(|&i| kept[i].clone()).collect();
    let polylines: Vec<Vec<usize>> = polylines
        .into_iter()
        .map(|line| line.into_iter().map(|i| position[i]).collect())
        .collect();
    let junctions = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.feet.len() >= 3 && !p.flat)
        .map(|(i, _)| i)
        .collect();
    Ok(DividerTrace {
        points,
        polylines,
        gaps,
        junctions,
    })
}

/// Returns, for each point, the index of the representative it was merged
/// into; representatives absorb the feet of the points merged into them.
fn cluster(points: &mut [DividerPoint], radius: f64, merge: f64, c: &ParametricCurve) -> Vec<Option<usize>> {
    use std::collections::HashMap;
    let key = |p: Point2| ((p.x1 / radius).floor() as i64, (p.x2 / radius).floor() as i64);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| points[i].kind.priority());
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut rep = vec![None; points.len()];
    for i in order {
        let (kx, ky) = key(points[i].center);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        if points[j].center.distance(points[i].center) <= radius {
                            found = Some(j);
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some(j) => {
                rep[i] = Some(j);
                let extra = points[i].feet.clone();
                let points_flat = points[i].flat;
                let target = &mut points[j];
                if target.flat || points_flat {
                    continue;
                }
                for t in extra {
                    if !target.feet.iter().any(|&s| c.param_delta(s, t).abs() <= merge) {
                        target.feet.push(t);
                    }
                }
                target.feet.sort_by(f64::total_cmp);
            }
            None => {
                rep[i] = Some(i);
                grid.entry((kx, ky)).or_default().push(i);
            }
        }
    }
    rep
}

fn chain(slot: &[Option<usize>], points: &[DividerPoint], closed: bool, diameter: f64) -> Vec<Vec<usize>> {
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for s in slot {
        match s {
            Some(i) => current.push(*i),
            None => {
                if !current.is_empty() {
                    runs.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        runs.push(current);
    }
    if closed && runs.len() > 1 && slot.first().is_some_and(|s| s.is_some()) && slot.last().is_some_and(|s| s.is_some()) {
        let first = runs.remove(0);
        runs.last_mut().unwrap().extend(first);
    } else if closed && runs.len() == 1 && slot.iter().all(|s| s.is_some()) {
        let first = runs[0][0];
        runs[0].push(first);
    }
    let mut lines = Vec::new();
    for run in runs {
        let gaps: Vec<f64> = run
            .windows(2)
            .map(|w| points[w[0]].center.distance(points[w[1]].center))
            .collect();
        let mut line = vec![run[0]];
        for k in 0..gaps.len() {
            let prev = if k > 0 { Some(gaps[k - 1]) } else { None };
            let next = gaps.get(k + 1).copied();
            let local = match (prev, next) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
            let split = local.is_some_and(|l| gaps[k] > 10.0 * l) && gaps[k] > 1e-6 * diameter;
            if split {
                if line.len() > 1 {
                    lines.push(std::mem::take(&mut line));
                }
                line.clear();
            }
            line.push(run[k + 1]);
        }
        if line.len() > 1 {
            lines.push(line);
        }
    }
    lines
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checked: usize,
    pub direct: usize,
    pub via_closure: usize,
    /// Points on circular arcs, where the distance is constant and the
    /// containment statement does not apply.
    pub exempt: usize,
    pub violations: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every Divider point lies in the closure of the set where
/// `K_lct > 0`: either at the point itself or somewhere on a small ring
/// around it (radius `1e-4` of the diameter, 16 directions).
pub fn divider_validate(points: &[DividerPoint], c: &ParametricCurve) -> ValidationReport {
    let ring = CLOSURE_RADIUS * c.diameter();
    let outcome: Vec<u8> = points
        .par_iter()
        .map(|p| {
            if p.flat {
                return 3;
            }
            if lclt_curvature(c, p.center).k_lct > 0.0 {
                return 1;
            }
            for s in [0.25, 0.5, 1.0] {
                for k in 0..16 {
                    let a = std::f64::consts::TAU * k as f64 / 16.0;
                    let q = p.center + Point2::new(a.cos(), a.sin()) * (s * ring);
                    if lclt_curvature(c, q).k_lct > 0.0 {
                        return 2;
                    }
                }
            }
            0
        })
        .collect();
    let mut report = ValidationReport {
        checked: points.len(),
        ..Default::default()
    };
    for (i, o) in outcome.into_iter().enumerate() {
        match o {
            1 => report.direct += 1,
            2 => report.via_closure += 1,
            3 => report.exempt += 1,
            _ => report.violations.push(i),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn circle_contact_disks() {
        let c = ParametricCurve::circle(1.0).unwrap();
        let d = contact_radius(&c, 0.4, Side::LeftNormal).unwrap();
        assert!(d.flat);
        assert!((d.radius - 1.0).abs() < 1e-12);
        assert!(d.center.norm() < 1e-12);
        let d = contact_radius(&c, 0.4, Side::RightNormal).unwrap();
        assert_eq!(d.radius, f64::INFINITY);
    }

    #[test]
    fn ellipse_minor_vertex_disk() {
        let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        let d = contact_radius(&c, FRAC_PI_2, Side::LeftNormal).unwrap();
        assert!((d.radius - 1.0).abs() < 1e-10);
        assert!(d.center.norm() < 1e-10);
        assert!((d.second_foot.unwrap() - 1.5 * PI).abs() < 1e-6);
    }

    #[test]
    fn ellipse_polish_residuals() {
        let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        let d = contact_radius(&c, 0.3, Side::LeftNormal).unwrap();
        let p = newton_polish(&c, &seed_from_disk(&d, &c)).unwrap();
        assert_eq!(p.kind, DividerKind::Regular);
        assert!(p.residual_max() < 1e-12 * c.diameter(), "{:?}", p.residuals);
        assert!(p.center.x2.abs() < 1e-12);
        assert!((p.center.x1 - 1.5 * 0.3f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn ellipse_vertex_is_endpoint() {
        let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        let d = contact_radius(&c, 0.0, Side::LeftNormal).unwrap();
        assert!(d.osculating);
        let p = newton_polish(&c, &seed_from_disk(&d, &c)).unwrap();
        assert_eq!(p.kind, DividerKind::Endpoint);
        assert!((p.center - Point2::new(1.5, 0.0)).norm() < 1e-14);
        assert!((p.radius - 0.5).abs() < 1e-14);
    }

    #[test]
    fn segment_intersection_basic() {
        let r = segment_intersection(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, -1.0),
            Point2::new(1.0, 1.0),
        );
        assert_eq!(r, Some((0.5, 0.5)));
        assert!(segment_intersection(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0)
        )
        .is_none());
    }

    #[test]
    fn hypotrochoid_crossings() {
        let c = ParametricCurve::hypotrochoid(5.0, 1.0, 2.0).unwrap();
        let xs = self_intersections(&c, 4096);
        assert_eq!(xs.len(), 5);
        for (a, b) in xs {
            assert!((c.position(a) - c.position(b)).norm() < 1e-12);
        }
    }
}
