//! Parametric plane curves: presets with analytic derivatives and sampled
//! curves interpolated by cubic splines.

use std::f64::consts::TAU;

use crate::geometry::{Point2, Vec2, Window};
use crate::{Error, Result};

/// Highest derivative order any evaluator supports.
pub const MAX_DERIVATIVE: u8 = 4;

const DIAMETER_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Circle { radius: f64 },
    Segment { from: Point2, to: Point2 },
    Ellipse { a: f64, b: f64 },
    /// `x2 = x1^2 / (4 focal)`, parameterized by `x1`.
    Parabola { focal: f64 },
    /// A point at distance `offset` from the center of a circle of radius
    /// `small` rolling inside a circle of radius `big`.
    Hypotrochoid { big: f64, small: f64, offset: f64 },
    Sampled(CubicSpline),
}

/// A regular plane curve `t -> S(t)` on a closed parameter interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCurve {
    shape: Shape,
    lo: f64,
    hi: f64,
    closed: bool,
    name: Option<String>,
    diameter: f64,
}

impl ParametricCurve {
    fn build(shape: Shape, lo: f64, hi: f64, closed: bool, name: Option<String>) -> Result<Self> {
        let mut curve = ParametricCurve {
            shape,
            lo,
            hi,
            closed,
            name,
            diameter: 0.0,
        };
        let window = curve.bounding_box(DIAMETER_SAMPLES);
        curve.diameter = window.width().hypot(window.height());
        if !(curve.diameter.is_finite() && curve.diameter > 0.0) {
            return Err(Error::InvalidCurve("curve has zero extent".into()));
        }
        curve.validate()?;
        Ok(curve)
    }

    /// Circle of radius `radius` centered at the origin, traversed
    /// counter-clockwise on `[0, 2 pi]`.
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidCurve(format!("circle radius must be positive, got {radius}")));
        }
        Self::build(Shape::Circle { radius }, 0.0, TAU, true, Some(format!("circle:{radius}")))
    }

    /// Straight segment `from + t (to - from)`, `t in [0, 1]`.
    pub fn segment(from: Point2, to: Point2) -> Result<Self> {
        if !(from.is_finite() && to.is_finite()) || from == to {
            return Err(Error::InvalidCurve("segment endpoints must be finite and distinct".into()));
        }
        let name = format!("segment:{},{},{},{}", from.x1, from.x2, to.x1, to.x2);
        Self::build(Shape::Segment { from, to }, 0.0, 1.0, false, Some(name))
    }

    /// Ellipse `(a cos t, b sin t)` with `a >= b > 0`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0 && a >= b && a.is_finite()) {
            return Err(Error::InvalidCurve(format!("ellipse needs a >= b > 0, got a={a}, b={b}")));
        }
        Self::build(Shape::Ellipse { a, b }, 0.0, TAU, true, Some(format!("ellipse:{a},{b}")))
    }

    /// Parabola with focal length `focal`, truncated to `|x1| <= 12 focal`.
    pub fn parabola(focal: f64) -> Result<Self> {
        Self::parabola_with_half_width(focal, 12.0 * focal)
    }

    pub fn parabola_with_half_width(focal: f64, half_width: f64) -> Result<Self> {
        if !(focal > 0.0 && half_width > 0.0 && focal.is_finite() && half_width.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "parabola needs positive focal length and half width, got {focal}, {half_width}"
            )));
        }
        Self::build(
            Shape::Parabola { focal },
            -half_width,
            half_width,
            false,
            Some(format!("parabola:{focal}")),
        )
    }

    /// Hypotrochoid with fixed-circle radius `big`, rolling radius `small`
    /// and pen offset `offset`. The ratio `big / small` must be rational with
    /// a denominator of at most 64 so that the curve closes.
    pub fn hypotrochoid(big: f64, small: f64, offset: f64) -> Result<Self> {
        if !(big > small && small > 0.0 && offset > 0.0 && big.is_finite() && offset.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "hypotrochoid needs R > r > 0 and d > 0, got R={big}, r={small}, d={offset}"
            )));
        }
        let k = (big - small) / small;
        let turns = (1..=64)
            .find(|&m| {
                let x = m as f64 * k;
                (x - x.round()).abs() < 1e-9
            })
            .ok_or_else(|| Error::InvalidCurve("hypotrochoid R/r must be a simple rational".into()))?;
        Self::build(
            Shape::Hypotrochoid { big, small, offset },
            0.0,
            TAU * turns as f64,
            true,
            Some(format!("hypotrochoid:{big},{small},{offset}")),
        )
    }

    /// Interpolating cubic spline through `points`, parameterized by sample
    /// index (periodic when `closed`).
    pub fn sampled(points: Vec<Point2>, closed: bool) -> Result<Self> {
        let spline = CubicSpline::new(points, closed)?;
        let hi = spline.domain_end();
        Self::build(Shape::Sampled(spline), 0.0, hi, closed, Some("sampled".into()))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn domain_length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Bounding-box diagonal; the length scale used by every relative
    /// tolerance in the crate.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn contains(&self, t: f64) -> bool {
        self.closed || (t >= self.lo && t <= self.hi)
    }

    /// Maps `t` into `[lo, hi)` for closed curves; clamps for open ones.
    pub fn wrap(&self, t: f64) -> f64 {
        if self.closed {
            let len = self.domain_length();
            let w = self.lo + (t - self.lo).rem_euclid(len);
            if w >= self.hi {
                self.lo
            } else {
                w
            }
        } else {
            t.clamp(self.lo, self.hi)
        }
    }

    /// Signed parameter difference `b - a`, taken the short way round on
    /// closed curves.
    pub fn param_delta(&self, a: f64, b: f64) -> f64 {
        let d = b - a;
        if self.closed {
            let len = self.domain_length();
            let w = d.rem_euclid(len);
            if w > 0.5 * len {
                w - len
            } else {
                w
            }
        } else {
            d
        }
    }

    /// Uniform parameter grid: `n` points on closed curves (the end point is
    /// the start point), `n + 1` points including both ends on open curves.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let step = self.domain_length() / n as f64;
        let count = if self.closed { n } else { n + 1 };
        (0..count)
            .map(|i| if !self.closed && i == n { self.hi } else { self.lo + i as f64 * step })
            .collect()
    }

    pub fn position(&self, t: f64) -> Point2 {
        self.evaluate(0, t)
    }

    /// Derivative of order `order` (1..=4) with respect to the parameter.
    pub fn derivative(&self, order: u8, t: f64) -> Vec2 {
        assert!(
            (1..=MAX_DERIVATIVE).contains(&order),
            "derivative order {order} not supported"
        );
        self.evaluate(order, t)
    }

    fn evaluate(&self, order: u8, t: f64) -> Point2 {
        match &self.shape {
            Shape::Circle { radius } => trig(order, 1.0, t) * *radius,
            Shape::Ellipse { a, b } => {
                let p = trig(order, 1.0, t);
                Point2::new(a * p.x1, b * p.x2)
            }
            Shape::Segment { from, to } => match order {
                0 => *from + (*to - *from) * t,
                1 => *to - *from,
                _ => Point2::ORIGIN,
            },
            Shape::Parabola { focal } => match order {
                0 => Point2::new(t, t * t / (4.0 * focal)),
                1 => Point2::new(1.0, t / (2.0 * focal)),
                2 => Point2::new(0.0, 1.0 / (2.0 * focal)),
                _ => Point2::ORIGIN,
            },
            Shape::Hypotrochoid { big, small, offset } => {
                let k = (big - small) / small;
                let carrier = trig(order, 1.0, t) * (big - small);
                let pen = trig(order, k, t) * *offset;
                Point2::new(carrier.x1 + pen.x1, carrier.x2 - pen.x2)
            }
            Shape::Sampled(spline) => {
                if order == 0 {
                    spline.eval(t)
                } else {
                    let len = self.domain_length();
                    let h = match order {
                        1 | 2 => 1e-5 * len,
                        _ => (1e-3 * len).min(0.05),
                    };
                    central_difference(|s| spline.eval(s), order, t, h)
                }
            }
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.derivative(1, t).norm()
    }

    fn singular_threshold(&self) -> f64 {
        1e-12 * self.diameter / self.domain_length()
    }

    fn checked_speed(&self, t: f64) -> Result<f64> {
        let speed = self.speed(t);
        if !(speed > self.singular_threshold()) {
            return Err(Error::SingularParameterization { t, speed });
        }
        Ok(speed)
    }

    pub fn unit_tangent(&self, t: f64) -> Result<Vec2> {
        let speed = self.checked_speed(t)?;
        Ok(self.derivative(1, t) / speed)
    }

    /// Unit normal obtained by rotating the tangent by +90 degrees.
    pub fn left_normal(&self, t: f64) -> Result<Vec2> {
        Ok(self.unit_tangent(t)?.perp())
    }

    /// Signed curvature, positive when the curve turns toward its left
    /// normal.
    pub fn signed_curvature(&self, t: f64) -> Result<f64> {
        let speed = self.checked_speed(t)?;
        let d1 = self.derivative(1, t);
        let d2 = self.derivative(2, t);
        Ok(d1.cross(d2) / speed.powi(3))
    }

    /// Derivative of the signed curvature with respect to the parameter.
    pub fn curvature_derivative(&self, t: f64) -> Result<f64> {
        let speed = self.checked_speed(t)?;
        let d1 = self.derivative(1, t);
        let d2 = self.derivative(2, t);
        let d3 = self.derivative(3, t);
        let s2 = speed * speed;
        Ok(d1.cross(d3) / (s2 * speed) - 3.0 * d1.cross(d2) * d1.dot(d2) / (s2 * s2 * speed))
    }

    pub fn sample(&self, n: usize) -> Vec<Point2> {
        let mut ts = self.grid(n);
        if self.closed {
            ts.push(self.hi);
        }
        ts.into_iter().map(|t| self.position(t)).collect()
    }

    pub fn bounding_box(&self, n: usize) -> Window {
        let mut w = Window::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.sample(n) {
            w.x0 = w.x0.min(p.x1);
            w.y0 = w.y0.min(p.x2);
            w.x1 = w.x1.max(p.x1);
            w.y1 = w.y1.max(p.x2);
        }
        w
    }

    /// Sampled checks of finiteness, continuity, closure and regularity.
    pub fn validate(&self) -> Result<()> {
        let n = DIAMETER_SAMPLES;
        let ts: Vec<f64> = (0..=n)
            .map(|i| self.lo + self.domain_length() * i as f64 / n as f64)
            .collect();
        let dt = self.domain_length() / n as f64;
        let tol = 1e-9 * self.diameter;
        let mut prev: Option<(Point2, Vec2, f64)> = None;
        for &t in &ts {
            let p = self.position(t);
            let d1 = self.derivative(1, t);
            let d2 = self.derivative(2, t);
            if !(p.is_finite() && d1.is_finite() && d2.is_finite()) {
                return Err(Error::InvalidCurve(format!("non-finite evaluation at t = {t}")));
            }
            if d1.norm() <= self.singular_threshold() * 1e3 {
                return Err(Error::InvalidCurve(format!("derivative vanishes at t = {t}")));
            }
            if let Some((q, e1, bound2)) = prev {
                let bound1 = 1.5 * d1.norm().max(e1.norm()) * dt + tol;
                if p.distance(q) > bound1 {
                    return Err(Error::InvalidCurve(format!("position jumps near t = {t}")));
                }
                let bound = 1.5 * d2.norm().max(bound2) * dt + tol;
                if (d1 - e1).norm() > bound + 1e-6 * d1.norm() {
                    return Err(Error::InvalidCurve(format!("tangent jumps near t = {t}")));
                }
            }
            prev = Some((p, d1, d2.norm()));
        }
        if self.closed && self.position(self.lo).distance(self.position(self.hi)) > 1e-9 * self.diameter {
            return Err(Error::InvalidCurve("closed curve does not close".into()));
        }
        Ok(())
    }
}

/// `order`-th derivative of `(cos wt, sin wt)`.
fn trig(order: u8, w: f64, t: f64) -> Point2 {
    let (s, c) = (w * t).sin_cos();
    let scale = w.powi(order as i32);
    let (dc, ds) = match order % 4 {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    };
    Point2::new(dc * scale, ds * scale)
}

/// Five-point central difference of order 1 to 4.
pub fn central_difference<F: Fn(f64) -> Point2>(f: F, order: u8, t: f64, h: f64) -> Point2 {
    let fm2 = f(t - 2.0 * h);
    let fm1 = f(t - h);
    let fp1 = f(t + h);
    let fp2 = f(t + 2.0 * h);
    match order {
        1 => (fm2 - fp2 + (fp1 - fm1) * 8.0) / (12.0 * h),
        2 => {
            let f0 = f(t);
            ((fm2 + fp2) * -1.0 + (fp1 + fm1) * 16.0 - f0 * 30.0) / (12.0 * h * h)
        }
        3 => (fp2 - fm2 + (fm1 - fp1) * 2.0) / (2.0 * h * h * h),
        4 => {
            let f0 = f(t);
            (fp2 + fm2 - (fp1 + fm1) * 4.0 + f0 * 6.0) / (h * h * h * h)
        }
        _ => panic!("unsupported difference order {order}"),
    }
}

/// Cubic spline through a point list with unit knot spacing: natural end
/// conditions when open, periodic when closed.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    points: Vec<Point2>,
    second: Vec<Point2>,
    closed: bool,
}

impl CubicSpline {
    pub fn new(points: Vec<Point2>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(Error::InvalidCurve(format!("need at least {min} sample points")));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve("sample points must be finite".into()));
        }
        let n = points.len();
        let rhs: Vec<Point2> = (0..n)
            .map(|i| {
                if closed {
                    let prev = points[(i + n - 1) % n];
                    let next = points[(i + 1) % n];
                    (prev + next - points[i] * 2.0) * 6.0
                } else if i == 0 || i == n - 1 {
                    Point2::ORIGIN
                } else {
                    (points[i - 1] + points[i + 1] - points[i] * 2.0) * 6.0
                }
            })
            .collect();
        let second = if closed {
            solve_cyclic_141(&rhs)
        } else if n == 2 {
            vec![Point2::ORIGIN; 2]
        } else {
            let mut m = vec![Point2::ORIGIN; n];
            let inner = solve_tridiagonal_141(&rhs[1..n - 1]);
            m[1..n - 1].copy_from_slice(&inner);
            m
        };
        Ok(CubicSpline { points, second, closed })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn domain_end(&self) -> f64 {
        if self.closed {
            self.points.len() as f64
        } else {
            (self.points.len() - 1) as f64
        }
    }

    pub fn eval(&self, t: f64) -> Point2 {
        let n = self.points.len();
        let (i, u) = if self.closed {
            let t = t.rem_euclid(n as f64);
            let i = (t.floor() as usize).min(n - 1);
            (i, t - i as f64)
        } else {
            let i = (t.floor().max(0.0) as usize).min(n - 2);
            (i, t - i as f64)
        };
        let j = if self.closed { (i + 1) % n } else { i + 1 };
        let v = 1.0 - u;
        self.points[i] * v
            + self.points[j] * u
            + self.second[i] * ((v * v * v - v) / 6.0)
            + self.second[j] * ((u * u * u - u) / 6.0)
    }
}

/// Solves the tridiagonal system with rows `[1, 4, 1]` (zero padding at the
/// ends) by the Thomas algorithm.
fn solve_tridiagonal_141(rhs: &[Point2]) -> Vec<Point2> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Point2::ORIGIN; n];
    for i in 0..n {
        let denom = 4.0 - if i > 0 { c[i - 1] } else { 0.0 };
        c[i] = 1.0 / denom;
        let prev = if i > 0 { d[i - 1] } else { Point2::ORIGIN };
        d[i] = (rhs[i] - prev) / denom;
    }
    let mut x = vec![Point2::ORIGIN; n];
    for i in (0..n).rev() {
        let next = if i + 1 < n { x[i + 1] } else { Point2::ORIGIN };
        x[i] = d[i] - next * c[i];
    }
    x
}

/// Cyclic `[1, 4, 1]` system via Sherman-Morrison on the Thomas solver.
fn solve_cyclic_141(rhs: &[Point2]) -> Vec<Point2> {
    let n = rhs.len();
    // A = T + u v^T with u = (gamma, 0, .., 1), v = (1, 0, .., 1/gamma).
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let solve = |b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 0..n {
            let denom = diag[i] - if i > 0 { c[i - 1] } else { 0.0 };
            c[i] = 1.0 / denom;
            d[i] = (b[i] - if i > 0 { d[i - 1] } else { 0.0 }) / denom;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = d[i] - if i + 1 < n { c[i] * x[i + 1] } else { 0.0 };
        }
        x
    };
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let z = solve(&u);
    let vz = z[0] + z[n - 1] / gamma;
    let coord = |f: fn(&Point2) -> f64| -> Vec<f64> {
        let b: Vec<f64> = rhs.iter().map(f).collect();
        let y = solve(&b);
        let vy = y[0] + y[n - 1] / gamma;
        let factor = vy / (1.0 + vz);
        y.iter().zip(&z).map(|(yi, zi)| yi - factor * zi).collect()
    };
    let xs = coord(|p| p.x1);
    let ys = coord(|p| p.x2);
    xs.into_iter().zip(ys).map(|(x, y)| Point2::new(x, y)).collect()
}

/// Parses `name:p1,p2,...` preset descriptions such as `ellipse:2,1`.
pub fn parse_preset(spec: &str) -> Result<ParametricCurve> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let values: Vec<f64> = params
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{s}` in preset `{spec}`")))
        })
        .collect::<Result<_>>()?;
    let arity = |n: &[usize]| -> Result<()> {
        if n.contains(&values.len()) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "preset `{name}` takes {n:?} parameters, got {}",
                values.len()
            )))
        }
    };
    match name.trim() {
        "circle" => {
            arity(&[1])?;
            ParametricCurve::circle(values[0])
        }
        "segment" => {
            arity(&[0, 4])?;
            if values.is_empty() {
                ParametricCurve::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0))
            } else {
                ParametricCurve::segment(Point2::new(values[0], values[1]), Point2::new(values[2], values[3]))
            }
        }
        "ellipse" => {
            arity(&[2])?;
            ParametricCurve::ellipse(values[0], values[1])
        }
        "parabola" => {
            arity(&[1, 2])?;
            match values[..] {
                [f] => ParametricCurve::parabola(f),
                [f, w] => ParametricCurve::parabola_with_half_width(f, w),
                _ => unreachable!(),
            }
        }
        "hypotrochoid" => {
            arity(&[0, 3])?;
            if values.is_empty() {
                ParametricCurve::hypotrochoid(5.0, 1.0, 2.0)
            } else {
                ParametricCurve::hypotrochoid(values[0], values[1], values[2])
            }
        }
        other => Err(Error::Parse(format!("unknown preset `{other}`"))),
    }
}

/// The preset family used by the test suites, in a fixed order.
pub fn standard_presets() -> Vec<ParametricCurve> {
    vec![
        ParametricCurve::circle(1.0).unwrap(),
        ParametricCurve::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)).unwrap(),
        ParametricCurve::ellipse(2.0, 1.0).unwrap(),
        ParametricCurve::parabola(0.25).unwrap(),
        ParametricCurve::hypotrochoid(5.0, 1.0, 2.0).unwrap(),
    ]
}
