//! Curve derivatives, metrics and feet.

use divider_core::foot::residual;
use divider_core::*;
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn fd(f: impl Fn(f64) -> Point2, t: f64, h: f64) -> Point2 {
    (f(t + h) - f(t - h)) * (0.5 / h)
}

proptest! {
    #[test]
    fn metric_axioms(ax in coord(), ay in coord(), bx in coord(), by in coord(), cx in coord(), cy in coord()) {
        let (a, b, c) = (Point2::new(ax, ay), Point2::new(bx, by), Point2::new(cx, cy));
        for m in MetricKind::ALL {
            prop_assert_eq!(metric_distance(a, a, m), 0.0);
            prop_assert_eq!(metric_distance(a, b, m), metric_distance(b, a, m));
            prop_assert!(metric_distance(a, c, m) <= metric_distance(a, b, m) + metric_distance(b, c, m) + 1e-12);
        }
        let l2 = metric_distance(a, b, MetricKind::Euclidean);
        prop_assert!(metric_distance(a, b, MetricKind::MaxCoordinate) <= l2 + 1e-12);
        prop_assert!(l2 <= metric_distance(a, b, MetricKind::Addition) + 1e-12);
    }

    #[test]
    fn ellipse_derivatives(a in 1.0..5.0f64, ratio in 0.2..1.0f64, t in 0.0..std::f64::consts::TAU) {
        let c = ParametricCurve::ellipse(a, a * ratio).unwrap();
        let h = 1e-5;
        for order in 1..=4u8 {
            let approx = if order == 1 {
                fd(|s| c.position(s), t, h)
            } else {
                fd(|s| c.derivative(order - 1, s), t, h)
            };
            let exact = c.derivative(order, t);
            prop_assert!((exact - approx).norm() <= 1e-6 * exact.norm().max(a));
        }
    }

    #[test]
    fn nearest_foot_beats_samples(x in -3.0..3.0f64, y in -2.0..2.0f64) {
        let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
        let p = Point2::new(x, y);
        let feet = all_feet(&c, p, 2048);
        let best = feet.minima().map(|f| f.distance).fold(f64::INFINITY, f64::min);
        let sampled = c.sample(5000).into_iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min);
        prop_assert!(best <= sampled + 1e-12);
        for f in &feet.feet {
            prop_assert!(residual(&c, p, f.t).abs() < 1e-9);
        }
    }
}

#[test]
fn curvature_of_presets() {
    let c = ParametricCurve::circle(2.0).unwrap();
    assert!((c.signed_curvature(0.7).unwrap() - 0.5).abs() < 1e-12);
    let e = ParametricCurve::ellipse(2.0, 1.0).unwrap();
    assert!((e.signed_curvature(0.0).unwrap() - 2.0).abs() < 1e-12);
    assert!((e.signed_curvature(std::f64::consts::FRAC_PI_2).unwrap() - 0.25).abs() < 1e-12);
    let p = ParametricCurve::parabola(0.25).unwrap();
    assert!((p.signed_curvature(0.0).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn invalid_presets_are_rejected() {
    assert!(ParametricCurve::circle(0.0).is_err());
    assert!(ParametricCurve::ellipse(1.0, 2.0).is_err());
    assert!(ParametricCurve::hypotrochoid(1.0, 2.0, 0.5).is_err());
    assert!(parse_preset("spiral:1").is_err());
    assert!(parse_preset("ellipse:2,1").is_ok());
}

#[test]
fn ellipse_evolute_cusps() {
    let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
    let cusps = find_cusps(&c, 2048).unwrap();
    assert_eq!(cusps.len(), 4);
    let expected = [Point2::new(1.5, 0.0), Point2::new(-1.5, 0.0), Point2::new(0.0, 3.0), Point2::new(0.0, -3.0)];
    for e in expected {
        assert!(cusps.iter().any(|k| k.center.distance(e) < 1e-9), "missing cusp at {e:?}");
    }
    assert_eq!(cusps.iter().filter(|k| k.kind == CuspKind::MaxCurvature).count(), 2);
    assert_eq!(osculating_contact_order(&c, 0.0).unwrap(), ContactOrder::ThirdOrHigher);
    assert_eq!(osculating_contact_order(&c, 0.3).unwrap(), ContactOrder::Second);
    assert!(evolute_point(&c, 0.0).unwrap().distance(Point2::new(1.5, 0.0)) < 1e-12);
}

#[test]
fn sampled_circle_tracks_preset() {
    let pts: Vec<Point2> = (0..200)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 200.0;
            Point2::new(t.cos(), t.sin())
        })
        .collect();
    let c = ParametricCurve::sampled(pts, true).unwrap();
    let (lo, hi) = c.domain();
    for k in 0..50 {
        let t = lo + (hi - lo) * (k as f64 + 0.3) / 50.0;
        assert!((c.position(t).norm() - 1.0).abs() < 1e-5);
        assert!((c.signed_curvature(t).unwrap() - 1.0).abs() < 1e-2);
    }
}
