//! Plane points and the three metrics used throughout the crate.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// A point (or free vector) of the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

/// Vectors share the representation of points.
pub type Vec2 = Point2;

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Point2 { x1, x2 }
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x1 * other.x2 - self.x2 * other.x1
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Vec2 {
        Point2::new(-self.x2, self.x1)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, rhs: Point2) {
        self.x1 += rhs.x1;
        self.x2 += rhs.x2;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x1 * rhs, self.x2 * rhs)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        rhs * self
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, rhs: f64) -> Point2 {
        Point2::new(self.x1 / rhs, self.x2 / rhs)
    }
}

/// The plane metrics: Euclidean, maximum-coordinate (Chebyshev) and
/// addition (Manhattan).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    MaxCoordinate,
    Addition,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [
        MetricKind::Euclidean,
        MetricKind::MaxCoordinate,
        MetricKind::Addition,
    ];

    /// Distance between two points given as coordinate differences.
    pub fn norm(self, dx: f64, dy: f64) -> f64 {
        match self {
            MetricKind::Euclidean => dx.hypot(dy),
            MetricKind::MaxCoordinate => dx.abs().max(dy.abs()),
            MetricKind::Addition => dx.abs() + dy.abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclid",
            MetricKind::MaxCoordinate => "maxcoord",
            MetricKind::Addition => "add",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclid" | "euclidean" | "l2" => Ok(MetricKind::Euclidean),
            "maxcoord" | "max" | "chebyshev" | "linf" => Ok(MetricKind::MaxCoordinate),
            "add" | "addition" | "manhattan" | "l1" => Ok(MetricKind::Addition),
            other => Err(crate::Error::Parse(format!("unknown metric `{other}`"))),
        }
    }
}

pub fn metric_distance(a: Point2, b: Point2, metric: MetricKind) -> f64 {
    metric.norm(a.x1 - b.x1, a.x2 - b.x2)
}

/// Axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Window { x0, y0, x1, y1 }
    }

    pub fn is_nonempty(&self) -> bool {
        self.x1 > self.x0 && self.y1 > self.y0
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x1 >= self.x0 && p.x1 <= self.x1 && p.x2 >= self.y0 && p.x2 <= self.y1
    }

    /// Grows the box by `frac` of its larger side on every edge.
    pub fn expanded(&self, frac: f64) -> Window {
        let m = frac * self.width().max(self.height());
        Window::new(self.x0 - m, self.y0 - m, self.x1 + m, self.y1 + m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(3.0, 4.0);
        assert_eq!(metric_distance(a, b, MetricKind::Euclidean), 5.0);
        assert_eq!(metric_distance(a, b, MetricKind::MaxCoordinate), 4.0);
        assert_eq!(metric_distance(a, b, MetricKind::Addition), 7.0);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in MetricKind::ALL {
            assert_eq!(m.name().parse::<MetricKind>().unwrap(), m);
        }
        assert!("taxicab?".parse::<MetricKind>().is_err());
    }

    #[test]
    fn rotation_and_perp() {
        let p = Point2::new(1.0, 0.0);
        let q = p.rotated(std::f64::consts::FRAC_PI_2);
        assert!((q - p.perp()).norm() < 1e-15);
        assert_eq!(p.cross(p.perp()), 1.0);
    }
}
