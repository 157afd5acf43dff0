//! Distance transforms and lattice dividers.

use divider_core::lattice::{components8, discrete_divider_with};
use divider_core::*;
use proptest::prelude::*;

fn brute(b: &Bitmap, m: MetricKind) -> Vec<f64> {
    let w = b.width;
    let boundary = b.boundary();
    (0..w * b.height)
        .map(|k| {
            if !b.cells()[k] {
                return f64::INFINITY;
            }
            (0..w * b.height)
                .filter(|&j| boundary[j])
                .map(|j| {
                    let (dx, dy) = ((k % w) as f64 - (j % w) as f64, (k / w) as f64 - (j / w) as f64);
                    match m {
                        MetricKind::Euclidean => (dx * dx + dy * dy).sqrt(),
                        MetricKind::MaxCoordinate => dx.abs().max(dy.abs()),
                        MetricKind::Addition => dx.abs() + dy.abs(),
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn bitmap() -> impl Strategy<Value = Bitmap> {
    (1..16usize, 1..16usize).prop_flat_map(|(w, h)| {
        prop::collection::vec(prop::bool::weighted(0.7), w * h)
            .prop_map(move |bits| Bitmap::from_fn(w, h, |x, y| bits[y * w + x]).unwrap())
    })
}

fn l_shape() -> Bitmap {
    Bitmap::from_fn(30, 30, |x, y| (2..28).contains(&x) && (2..28).contains(&y) && (x < 12 || y > 17)).unwrap()
}

fn ridge_fraction(b: &Bitmap, m: MetricKind) -> f64 {
    let (mask, field) = discrete_divider_with(b, m, &LatticeParams::default()).unwrap();
    let f = field.unwrap();
    let value = |x: isize, y: isize| {
        if x < 0 || y < 0 || x as usize >= b.width || y as usize >= b.height {
            return 0.0;
        }
        let d = f.get(x as usize, y as usize);
        if d.is_finite() {
            d
        } else {
            0.0
        }
    };
    let mut good = 0;
    for y in 0..b.height {
        for x in 0..b.width {
            if !mask.get(x, y) {
                continue;
            }
            let d = f.get(x, y);
            let lower = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]
                .iter()
                .filter(|(dx, dy)| value(x as isize + dx, y as isize + dy) <= d)
                .count();
            if lower >= 6 {
                good += 1;
            }
        }
    }
    good as f64 / mask.count().max(1) as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_are_exact(b in bitmap()) {
        prop_assume!(!b.is_empty() && b.boundary().iter().any(|&v| v));
        for m in MetricKind::ALL {
            let f = distance_transform(&b, m).unwrap();
            prop_assert_eq!(&f.dist, &brute(&b, m));
        }
    }

    #[test]
    fn divider_cells_are_foreground(b in bitmap()) {
        prop_assume!(!b.is_empty());
        let mask = discrete_divider(&b, MetricKind::Euclidean).unwrap();
        for y in 0..b.height {
            for x in 0..b.width {
                prop_assert!(!mask.get(x, y) || b.get(x, y));
            }
        }
    }
}

#[test]
fn ridge_property_holds_statistically() {
    let shapes = [Bitmap::rectangle(20, 9, 1).unwrap(), Bitmap::rectangle(24, 12, 1).unwrap(), l_shape()];
    for b in &shapes {
        for m in MetricKind::ALL {
            let frac = ridge_fraction(b, m);
            assert!(frac >= 0.95, "{m:?}: only {frac:.3} of divider cells are ridge cells");
        }
    }
}

#[test]
fn l_shape_depends_on_metric() {
    let b = l_shape();
    let euclid = discrete_divider(&b, MetricKind::Euclidean).unwrap();
    let maxc = discrete_divider(&b, MetricKind::MaxCoordinate).unwrap();
    let differ = euclid.cells().iter().zip(maxc.cells()).filter(|(a, b)| a != b).count();
    assert!(differ > 0);
}

#[test]
fn rectangles_give_connected_dividers() {
    for (w, h) in [(10, 4), (11, 5), (20, 7), (16, 16), (30, 12)] {
        let mask = discrete_divider(&Bitmap::rectangle(w, h, 1).unwrap(), MetricKind::MaxCoordinate).unwrap();
        assert_eq!(components8(&mask), 1, "{w}x{h}");
    }
}

#[test]
fn thinning_keeps_connectivity() {
    let b = Bitmap::rectangle(20, 8, 1).unwrap();
    let params = LatticeParams {
        thin: true,
        ..Default::default()
    };
    let (thin, _) = discrete_divider_with(&b, MetricKind::MaxCoordinate, &params).unwrap();
    let full = discrete_divider(&b, MetricKind::MaxCoordinate).unwrap();
    assert!(thin.count() < full.count());
    assert_eq!(components8(&thin), 1);
}
