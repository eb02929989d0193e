//! Gauss–Legendre rules and tensor-product integration on rectangles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::summation::pairwise_sum;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) and P_n'(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `∫_a^b f` with an `n`-point rule.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    let terms: Vec<f64> = x.iter().zip(&w).map(|(&xi, &wi)| wi * f(mid + half * xi)).collect();
    half * pairwise_sum(&terms)
}

/// `∫_{ax}^{bx} ∫_{ay}^{by} f(x, y) dy dx` with an `n × n` tensor rule.
pub fn integrate_rect(f: impl Fn(f64, f64) -> f64, ax: f64, bx: f64, ay: f64, by: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let (mx, hx) = ((ax + bx) / 2.0, (bx - ax) / 2.0);
    let (my, hy) = ((ay + by) / 2.0, (by - ay) / 2.0);
    let mut terms = Vec::with_capacity(n * n);
    for (&xi, &wi) in x.iter().zip(&w) {
        for (&yj, &wj) in x.iter().zip(&w) {
            terms.push(wi * wj * f(mx + hx * xi, my + hy * yj));
        }
    }
    hx * hy * pairwise_sum(&terms)
}

/// `∫∫_{[0,a]²} f` for integrands that are bounded but direction-dependent at
/// the corner `(0, 0)`. The square is split along its diagonal and each
/// triangle mapped by `(u, v) ↦ (u, u v)` (Duffy), which absorbs the corner.
pub fn integrate_square_corner(f: impl Fn(f64, f64) -> f64, a: f64, n: usize) -> f64 {
    let lower = integrate_rect(|u, v| u * f(u, u * v), 0.0, a, 0.0, 1.0, n);
    let upper = integrate_rect(|u, v| u * f(u * v, u), 0.0, a, 0.0, 1.0, n);
    lower + upper
}

/// Runs `rule(n)` and `rule(2n)`; fails if they differ by more than `tol`.
pub fn with_doubling_check(rule: impl Fn(usize) -> f64, n: usize, tol: f64) -> Result<f64> {
    let coarse = rule(n);
    let fine = rule(2 * n);
    if !(coarse - fine).abs().le(&tol) {
        return Err(Error::Numerical(format!(
            "quadrature not converged: {n} nodes give {coarse:.16e}, {} give {fine:.16e}",
            2 * n
        )));
    }
    Ok(fine)
}
