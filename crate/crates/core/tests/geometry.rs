use std::f64::consts::PI;

use polydisc::constructions::{kite4, regular_ngon};
use polydisc::geometry::*;
use polydisc::Error;
use proptest::prelude::*;

fn cfg(xy: &[(f64, f64)]) -> PointConfig {
    PointConfig::from_xy(xy).unwrap()
}

fn random_config(n: usize) -> impl Strategy<Value = PointConfig> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n).prop_filter_map("distinct", |xy| {
        let c = PointConfig::from_xy(&xy).ok()?;
        (c.min_distance() > 1e-2).then_some(c)
    })
}

fn sized_config() -> impl Strategy<Value = PointConfig> {
    (3usize..=12).prop_flat_map(random_config)
}

/// Central differences of the log objective, step h.
fn fd_gradient(c: &PointConfig, h: f64) -> Vec<f64> {
    let pts = c.points().to_vec();
    let mut out = Vec::with_capacity(2 * pts.len());
    for k in 0..pts.len() {
        for dir in [Point::new(h, 0.0), Point::new(0.0, h)] {
            let mut plus = pts.clone();
            let mut minus = pts.clone();
            plus[k] += dir;
            minus[k] -= dir;
            let fp = log_discriminant(&PointConfig::new(plus).unwrap());
            let fm = log_discriminant(&PointConfig::new(minus).unwrap());
            out.push((fp - fm) / (2.0 * h));
        }
    }
    out
}

#[test]
fn discriminant_examples() {
    assert_eq!(discriminant(&cfg(&[(0.0, 0.0), (2.0, 0.0)])).delta, Some(4.0));
    let s3 = 3f64.sqrt();
    let tri = discriminant(&cfg(&[(0.0, 0.0), (2.0, 0.0), (1.0, s3)]));
    assert!((tri.delta.unwrap() - 64.0).abs() < 1e-12);
    let sq = discriminant(&cfg(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]));
    assert!((sq.delta.unwrap() - 256.0).abs() < 1e-11);
}

#[test]
fn empty_product_and_coincidence() {
    assert_eq!(discriminant(&cfg(&[])).delta, Some(1.0));
    assert_eq!(discriminant(&cfg(&[(3.0, 4.0)])).delta, Some(1.0));
    let d = discriminant(&cfg(&[(1.0, 1.0), (1.0, 1.0), (0.0, 0.0)]));
    assert_eq!(d.delta, Some(0.0));
    assert_eq!(d.log_delta, f64::NEG_INFINITY);
}

#[test]
fn non_finite_rejected() {
    assert!(matches!(PointConfig::from_xy(&[(f64::NAN, 0.0)]), Err(Error::InvalidInput(_))));
    assert!(PointConfig::from_xy(&[(0.0, f64::INFINITY)]).is_err());
}

#[test]
fn log_only_for_large_n() {
    // regular 400-gon of diameter 2 has log Δ = 400 ln 400 ≈ 2397, beyond f64
    let d = discriminant(&regular_ngon(400).unwrap());
    assert!(d.delta.is_none());
    assert!((d.log_delta - 400.0 * 400f64.ln()).abs() < 1e-8);
}

#[test]
fn normalized_examples() {
    let s3 = 3f64.sqrt();
    let kite = normalized_discriminant(&kite4(), true).unwrap();
    assert!((kite - 16.0 * (7.0 - 4.0 * s3)).abs() < 1e-12);
    let hex = normalized_discriminant(&regular_ngon(6).unwrap(), true).unwrap();
    assert!((hex - 1.0).abs() < 1e-13);
    let pent = normalized_discriminant(&regular_ngon(5).unwrap(), true).unwrap();
    assert!((pent - 0.8f64.powi(5) * (5f64.sqrt() - 1.0).powi(10)).abs() < 1e-12);
    // rescale flag: the same value from a shrunken copy
    let shrunk = normalized_discriminant(&kite4().scaled(0.37), true).unwrap();
    assert!((shrunk - kite).abs() < 1e-12);
    assert!(normalized_discriminant(&cfg(&[]), true).is_err());
    assert!(normalized_discriminant(&cfg(&[(1.0, 1.0), (1.0, 1.0)]), true).is_err());
}

#[test]
fn diameter_examples() {
    assert_eq!(diameter(&cfg(&[(0.0, 0.0), (2.0, 0.0)])).unwrap(), 2.0);
    assert!(diameter(&cfg(&[(0.0, 0.0)])).is_err());
}

#[test]
fn normalize_examples() {
    let out = normalize_to_diameter(&cfg(&[(0.0, 0.0), (1.0, 0.0)]), 2.0).unwrap();
    assert_eq!(out.to_xy(), vec![[0.0, 0.0], [2.0, 0.0]]);
    let kite = kite4();
    let same = normalize_to_diameter(&kite, 2.0).unwrap();
    for (a, b) in kite.points().iter().zip(same.points()) {
        assert!((a - b).norm() < 1e-14);
    }
    assert!(normalize_to_diameter(&cfg(&[(1.0, 1.0), (1.0, 1.0)]), 2.0).is_err());
}

#[test]
fn convexity_examples() {
    let square = cfg(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]);
    assert!(is_convex_position(&square, DEFAULT_CONVEX_TOL).unwrap());
    let with_center = cfg(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (0.0, 0.0)]);
    assert!(!is_convex_position(&with_center, DEFAULT_CONVEX_TOL).unwrap());
    let on_edge = cfg(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
    assert!(!is_convex_position(&on_edge, DEFAULT_CONVEX_TOL).unwrap());
    let dup = cfg(&[(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)]);
    assert!(is_convex_position(&dup, DEFAULT_CONVEX_TOL).is_err());
}

#[test]
fn gradient_two_points() {
    let g = objective_gradient(&cfg(&[(-1.0, 0.0), (1.0, 0.0)])).unwrap();
    assert_eq!(g, vec![-1.0, 0.0, 1.0, 0.0]);
    assert!(matches!(objective_gradient(&cfg(&[(0.0, 0.0), (0.0, 0.0)])), Err(Error::Singular(_))));
}

#[test]
fn gradient_radial_on_even_polygons() {
    for n in [4, 6, 8, 10, 12] {
        let c = regular_ngon(n).unwrap();
        let fd = fd_gradient(&c, 1e-6);
        for (k, p) in c.points().iter().enumerate() {
            let g = Point::new(fd[2 * k], fd[2 * k + 1]);
            let tangential = (g * p.conj()).im / p.norm();
            assert!(tangential.abs() < 1e-8, "n={n} k={k}: {tangential}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gradient_matches_finite_differences(c in sized_config()) {
        let g = objective_gradient(&c).unwrap();
        let fd = fd_gradient(&c, 1e-6);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
        let err = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err / norm < 1e-5, "rel err {}", err / norm);
    }

    #[test]
    fn scaling_law(c in sized_config(), s in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let n = c.len() as f64;
        let diff = log_discriminant(&c.scaled(s)) - log_discriminant(&c);
        prop_assert!((diff - n * (n - 1.0) * s.ln()).abs() < 1e-9);
    }

    #[test]
    fn rigid_motion_invariance(c in sized_config(), angle in 0.0..2.0 * PI, tx in -5.0f64..5.0, ty in -5.0f64..5.0) {
        let base = log_discriminant(&c);
        let moved = log_discriminant(&c.rotated(angle).translated(Point::new(tx, ty)));
        // relative 1e-12 on Δ is absolute 1e-12 on log Δ
        prop_assert!((moved - base).abs() < 1e-12 * base.abs().max(1.0));
    }

    #[test]
    fn log_space_consistency(c in random_config(6)) {
        let d = discriminant(&c);
        let delta = d.delta.unwrap();
        prop_assert!((d.log_delta.exp() - delta).abs() <= 1e-10 * delta);
    }

    #[test]
    fn normalization_hits_target(c in sized_config(), target in 0.1f64..10.0) {
        let out = normalize_to_diameter(&c, target).unwrap();
        prop_assert!((diameter(&out).unwrap() - target).abs() <= 1e-14 * target * 4.0);
    }
}
