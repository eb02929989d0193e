use std::f64::consts::PI;

use num_complex::Complex64;
use polydisc::asymptotics::*;
use polydisc::constructions::{arc_polygon, regular_ngon, triwave, triwave_default_amplitude};
use polydisc::geometry;
use polydisc::special::{tri, zeta3};
use polydisc::Error;

#[test]
fn constant_examples() {
    let cstar = constant("Cstar").unwrap();
    assert!((cstar.closed_form_value - 1.304457).abs() < 1e-6);
    assert!(cstar.passed());
    let eb = constant("even_bound").unwrap();
    assert!((eb.closed_form_value - 1.26853).abs() < 1e-5);
    let c3 = constant("C3").unwrap();
    assert!((c3.closed_form_value - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert!((-c3.closed_form_value.ln() - (2f64.ln() - 3f64.ln() / 2.0)).abs() < 1e-15);
    assert!((-c3.alt_route_value.ln() - 0.1438410363).abs() < 1e-8);
    assert_eq!(constant("cstar").unwrap().name, "Cstar");
    assert!(matches!(constant("bogus"), Err(Error::UnknownName(_))));
}

#[test]
fn every_report_within_tolerance() {
    let all = all_constants().unwrap();
    assert_eq!(all.len(), CONSTANT_NAMES.len());
    for r in all {
        assert!(r.passed(), "{}: {:e}", r.name, r.abs_discrepancy);
        assert!(!r.alt_route.is_empty());
    }
}

#[test]
fn regime_integrals() {
    let want1 = -0.25 + PI * 3f64.sqrt() / 24.0 + 3f64.ln() / 8.0;
    assert!((regime_integral(1).unwrap() - want1).abs() < 1e-8);
    assert!((want1 - 0.1140514566).abs() < 1e-10);
    assert!((regime_integral(2).unwrap() - 0.1366658305).abs() < 1e-8);
    assert!((regime_integral(3).unwrap() - 0.1438410363).abs() < 1e-8);
    assert!((regime_integral(2).unwrap() + c2_closed_form().ln()).abs() < 1e-8);
    assert!((regime_integral(3).unwrap() + c3_closed_form().ln()).abs() < 1e-8);
    assert!(regime_integral(4).is_err());
}

/// The integrand stays bounded near the corner.
#[test]
fn regime_integrands_bounded() {
    for r in 1..=3u8 {
        let mut m = 0.0f64;
        for a in 1..=60 {
            for b in 1..=60 {
                let (x, y) = (a as f64 * PI / 360.0, b as f64 * PI / 360.0);
                m = m.max(regime_integrand(r, x, y).unwrap().abs());
            }
        }
        assert!(m.is_finite() && m < 10.0, "regime {r}: {m}");
    }
}

#[test]
fn cstar_identity() {
    let lhs = cstar_closed_form().ln();
    let rhs = PI * PI / 8.0 + 3.0 * c1_closed_form().ln() + 3.0 * c2_closed_form().ln() + 1.5 * c3_closed_form().ln();
    assert!((lhs - rhs).abs() < 1e-10);
}

#[test]
fn regime_products_converge() {
    for r in 1..=3u8 {
        let v = regime_product(r, 400).unwrap();
        assert!((v - regime_limit(r).unwrap()).abs() < 5e-3, "regime {r}: {v}");
    }
    assert!(regime_product(1, 0).is_err());
}

#[test]
fn regime_one_order() {
    let c1 = c1_closed_form();
    let scaled: Vec<f64> = [50, 100, 200, 400]
        .iter()
        .map(|&k| (regime_product(1, k).unwrap() - c1).abs() * k as f64)
        .collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo < 3.0, "k·error {scaled:?}");
}

/// Per-pair formulas against measured distances in the arc polygon `Y` and
/// the regular polygon of unit diameter.
#[test]
fn regime_formulas_match_polygons() {
    let k = 10;
    let n = 6 * k;
    let y = arc_polygon(k).unwrap().y;
    let yp = y.points();
    let x = regular_ngon(n).unwrap().scaled(0.5);
    let xp = x.points();
    let d2 = |p: &[polydisc::Point], a: usize, b: usize| (p[a % n] - p[b % n]).norm_sqr();
    for i in 1..=k {
        for j in 1..=k {
            let (b1, b2, a) = regime_pair_distances(1, k, i, j).unwrap();
            let mut got = [d2(yp, k - i, k + j), d2(yp, 2 * k - i, 2 * k + j)];
            let mut want = [b1, b2];
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
            assert!((d2(xp, k - i, k + j) - a).abs() < 1e-12);

            let (b1, b2, a) = regime_pair_distances(2, k, i, j).unwrap();
            let mut got = [d2(yp, k - i, 2 * k + j), d2(yp, 2 * k - i, 3 * k + j)];
            let mut want = [b1, b2];
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
            assert!((d2(xp, k - i, 2 * k + j) - a).abs() < 1e-12);

            let (b, _, a) = regime_pair_distances(3, k, i, j).unwrap();
            assert!((d2(yp, k - i, 4 * k - j) - b).abs() < 1e-12);
            assert!((d2(xp, k - i, 4 * k - j) - a).abs() < 1e-12);
        }
    }
}

#[test]
fn j_series_examples() {
    let s = J_series(100_000).unwrap();
    let z3 = zeta3();
    assert!(z3.error_bound < 1e-12);
    let closed = 1.0 / 3.0 - 84.0 * z3.value / PI.powi(4);
    assert!((s.value - closed).abs() < 1e-9);
    assert!((s.value - (-0.70325)).abs() < 1e-5);
    assert!(s.value < 0.0);
    assert!(s.error_bound < 1e-9);
    // truncation error shrinks with r_max and stays within the bound
    for r in [11, 101, 1001] {
        let v = J_series(r).unwrap();
        assert!((v.value - closed).abs() <= v.error_bound);
    }
    assert!(J_series(0).is_err());
}

#[test]
fn j_riemann_examples() {
    let r = j_riemann(4000).unwrap();
    assert!((r - j_closed_form()).abs() < 2e-3);
    assert!((j_riemann(8).unwrap() - j_discrete(8).unwrap()).abs() < 1e-12);
    assert!(j_riemann(7).is_err());
    assert!(j_riemann(6).is_err());
}

/// |F| ≤ (π · Lip(f) / 2)² with Lip(f) ≤ 6/π + 1, on a grid away from the diagonal.
#[test]
fn f_bounded() {
    let bound = (PI * (6.0 / PI + 1.0) / 2.0).powi(2);
    let f = |x: f64| tri(3.0 * x) * Complex64::from_polar(1.0, x);
    let n = 400;
    let mut m = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (x, y) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
            let rho = (f(x) - f(y)) / (Complex64::from_polar(1.0, x) - Complex64::from_polar(1.0, y));
            m = m.max(rho.powi(2).re.abs());
        }
    }
    assert!(m <= bound, "{m} > {bound}");
}

#[test]
fn rk_examples() {
    assert!((rk_integral_check(1, 1, 64).unwrap() - 1.0).norm() < 1e-6);
    assert!((rk_integral_check(4, -2, 64).unwrap() + 2.0).norm() < 1e-6);
    assert!(rk_integral_check(2, 3, 64).unwrap().norm() < 1e-6);
    for k in -8..=8 {
        for l in -8..=8 {
            let v = rk_integral_check(k, l, 64).unwrap();
            assert!((v - rk_expected(k, l)).norm() < 1e-6, "({k},{l}): {v}");
        }
    }
    assert!(rk_integral_check(9, 0, 64).is_err());
    // R_1 ≡ 1 and R_0 ≡ 0 pointwise
    assert!((r_k(1, 0.3, 2.0) - 1.0).norm() < 1e-14);
    assert!(r_k(0, 0.3, 2.0).norm() < 1e-14);
}

#[test]
fn tri_coefficients() {
    for k in 1..=9 {
        let a = tri_fourier_coefficient(k, 4096);
        assert!((a - tri_fourier_expected(k)).abs() < 1e-8, "k={k}: {a}");
    }
    assert!((tri_fourier_expected(3) - 8.0 / (9.0 * PI * PI)).abs() < 1e-15);
    assert_eq!(tri_fourier_expected(4), 0.0);
}

#[test]
fn triwave_second_order() {
    let t = triwave(2000, 3, None).unwrap();
    let measured = geometry::log_normalized_discriminant(&t.config, false).unwrap();
    let pred = triwave_prediction(2000).unwrap();
    assert!((pred - measured).abs() < 5e-4);
    let nt = 2000.0 * triwave_default_amplitude(2000);
    assert!((pred + nt * nt / 2.0 * j_discrete(2000).unwrap()).abs() < 1e-14);
    // limit: (n t_n)² → π⁴/144 and J_discrete → J
    let lim = -(PI.powi(4) / 144.0) / 2.0 * j_closed_form();
    assert!((lim - triwave_limit_log()).abs() < 1e-12);
    assert!((triwave_limit_log() - (7.0 * zeta3().value / 24.0 - PI.powi(4) / 864.0)).abs() < 1e-15);
}

#[test]
fn linear_cancellation() {
    assert!(triwave_rho_sum(64).unwrap().norm() < 1e-10);
    assert!(triwave_rho_sum(200).unwrap().norm() < 1e-9);
}

#[test]
fn cosine_sum_bound() {
    for n in [12, 24, 48] {
        let m = cosine_sum_max(n, 200_000).unwrap();
        assert!(m.abs_error < 1e-6, "n={n}: {}", m.abs_error);
        assert!((m.closed_form - 1.0 / (PI / (2 * n) as f64).sin()).abs() < 1e-15);
    }
    assert!(cosine_sum_max(0, 10).is_err());
}

#[test]
fn frequency_sweep_runs() {
    let sweep = triwave_frequency_sweep(64, &[1, 3, 5]).unwrap();
    assert_eq!(sweep.len(), 3);
    assert!(sweep.iter().all(|(_, v)| v.is_finite()));
    assert!(triwave_frequency_sweep(64, &[2]).is_err());
}
