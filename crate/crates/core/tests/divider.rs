//! Contact disks and traced Divider sets.

use divider_core::*;
use proptest::prelude::*;

fn trace(c: &ParametricCurve, n_grid: usize) -> DividerTrace {
    let cfg = DividerConfig {
        n_grid,
        ..Default::default()
    };
    divider_trace(c, &cfg).unwrap()
}

fn hypotrochoid() -> ParametricCurve {
    ParametricCurve::hypotrochoid(5.0, 1.0, 2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contact_disks_are_supremal(u in 0.0..1.0f64, left in any::<bool>(), which in 0..2usize) {
        let c = if which == 0 { ParametricCurve::ellipse(2.0, 1.0).unwrap() } else { hypotrochoid() };
        let (lo, hi) = c.domain();
        let t1 = lo + u * (hi - lo);
        let side = if left { Side::LeftNormal } else { Side::RightNormal };
        let disk = contact_radius(&c, t1, side).unwrap();
        prop_assume!(disk.is_finite() && disk.radius > 1e-3);
        let r = disk.radius;
        let samples = c.sample(500);
        let closest = samples.iter().map(|q| q.distance(disk.center)).fold(f64::INFINITY, f64::min);
        prop_assert!(closest >= r - 1e-9 * c.diameter());
        let s1 = c.position(t1);
        let normal = c.left_normal(t1).unwrap() * side.sign();
        let bigger = s1 + normal * (1.01 * r);
        let feet = all_feet(&c, bigger, 4096);
        let inside = feet.minima().any(|f| f.distance < 1.01 * r && f.point.distance(s1) > 1e-3 * r);
        prop_assert!(inside);
    }
}

#[test]
fn equal_distance_certificate() {
    for c in [ParametricCurve::ellipse(2.0, 1.0).unwrap(), hypotrochoid()] {
        let tr = trace(&c, 256);
        for p in tr.points.iter().filter(|p| p.kind == DividerKind::Regular) {
            let d1 = c.position(p.t1).distance(p.center);
            let d2 = c.position(p.t2).distance(p.center);
            assert!((d1 - d2).abs() < 1e-10 * c.diameter());
        }
    }
}

#[test]
fn ellipse_is_reflection_symmetric() {
    let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
    let tr = trace(&c, 512);
    let pts: Vec<Point2> = tr.points.iter().map(|p| p.center).collect();
    for p in &pts {
        for image in [Point2::new(-p.x1, p.x2), Point2::new(p.x1, -p.x2)] {
            let d = pts.iter().map(|q| q.distance(image)).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "{p:?} has no mirror image");
        }
    }
}

#[test]
fn parabola_ray_starts_at_osculating_center() {
    let c = ParametricCurve::parabola(0.25).unwrap();
    let tr = trace(&c, 512);
    let ends: Vec<&DividerPoint> = tr.points.iter().filter(|p| p.kind == DividerKind::Endpoint).collect();
    assert_eq!(ends.len(), 1);
    assert!(ends[0].center.distance(Point2::new(0.0, 0.5)) < 1e-9);
    assert!(tr.gaps.iter().all(|g| g.reason == divider_core::divider::GapReason::Unbounded));
}

#[test]
fn ellipse_endpoints_need_the_closure() {
    let c = ParametricCurve::ellipse(2.0, 1.0).unwrap();
    assert_eq!(lclt_curvature(&c, Point2::new(1.5, 0.0)).k_lct, 0.0);
    let tr = trace(&c, 512);
    let ends: Vec<DividerPoint> = tr.points.iter().filter(|p| p.kind == DividerKind::Endpoint).cloned().collect();
    let rep = divider_validate(&ends, &c);
    assert!(rep.is_ok());
    assert_eq!(rep.via_closure, 2);
}

#[test]
fn five_fold_junction() {
    let c = ParametricCurve::hypotrochoid(5.0, 2.0, 0.5).unwrap();
    let tr = trace(&c, 1000);
    assert_eq!(tr.count(DividerKind::ZeroRadius), 5);
    let center = tr
        .junctions
        .iter()
        .map(|&i| &tr.points[i])
        .find(|p| p.center.norm() < 1e-6)
        .expect("junction at the origin");
    assert_eq!(center.feet.len(), 5);
    for p in tr.points.iter().filter(|p| p.kind == DividerKind::ZeroRadius) {
        assert!(p.radius < 1e-6 * c.diameter());
    }
}

#[test]
fn segment_has_no_divider() {
    let c = ParametricCurve::segment(Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
    let tr = trace(&c, 256);
    assert!(tr.points.is_empty());
}
