//! Limiting constants of the arc and triangular-wave constructions, each
//! computed by a closed form and by an independent numerical route.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::constructions::{triwave_default_amplitude, triwave_profile};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_1d, integrate_rect, integrate_square_corner, with_doubling_check};
use crate::special::{tri, zeta3};
use crate::summation::{pairwise_sum, parallel_rows};

const SQRT3: f64 = 1.732_050_807_568_877_2;
const LN_3: f64 = 1.098_612_288_668_109_8;

pub const CONSTANT_NAMES: [&str; 6] = ["C1", "C2", "C3", "Cstar", "J", "even_bound"];

/// Gauss–Legendre nodes per axis for the regime integrals.
pub const REGIME_QUAD_NODES: usize = 64;
/// Allowed change when the node count is doubled.
pub const REGIME_QUAD_TOL: f64 = 1e-10;
/// Series truncation used for the J route.
pub const J_SERIES_TERMS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub name: String,
    pub closed_form_value: f64,
    pub alt_route_value: f64,
    pub alt_route: String,
    pub abs_discrepancy: f64,
    pub tolerance: f64,
}

impl ConstantReport {
    pub fn passed(&self) -> bool {
        self.abs_discrepancy <= self.tolerance
    }
}

pub fn c1_closed_form() -> f64 {
    (0.25 - PI * SQRT3 / 24.0 - LN_3 / 8.0).exp()
}

pub fn c2_closed_form() -> f64 {
    (-0.25 - LN_2 / 2.0 - PI * SQRT3 / 24.0 + 5.0 * LN_3 / 8.0).exp()
}

pub fn c3_closed_form() -> f64 {
    SQRT3 / 2.0
}

/// `3^{9/4}/8 · exp((π² − 2√3π)/8)`.
pub fn cstar_closed_form() -> f64 {
    3f64.powf(2.25) / 8.0 * ((PI * PI - 2.0 * SQRT3 * PI) / 8.0).exp()
}

/// `1/3 − 84 ζ(3)/π⁴`.
pub fn j_closed_form() -> f64 {
    1.0 / 3.0 - 84.0 * zeta3().value / PI.powi(4)
}

/// `exp(7ζ(3)/24 − π⁴/864)`.
pub fn even_bound_closed_form() -> f64 {
    (7.0 * zeta3().value / 24.0 - PI.powi(4) / 864.0).exp()
}

/// `log(bound) = −(π²/12)² J / 2`.
pub fn even_bound_from_j(j: f64) -> f64 {
    (-(PI * PI / 12.0).powi(2) * j / 2.0).exp()
}

fn regime_index(regime: u8) -> Result<usize> {
    match regime {
        1..=3 => Ok(regime as usize),
        _ => invalid(format!("regime must be 1, 2 or 3, got {regime}")),
    }
}

/// Phase `φ` in the denominator `sin⁴(b + c + φ)`.
fn regime_phase(regime: usize) -> f64 {
    [0.0, 0.0, PI / 6.0, PI / 3.0][regime]
}

fn numerator(regime: usize, b: f64, c: f64) -> f64 {
    let (sb, cb) = b.sin_cos();
    let (sc, cc) = c.sin_cos();
    match regime {
        1 => 2.0 * (sb * sb + sc * sc) * (b + c).cos() * sb * sc + 4.0 * sb * sb * sc * sc,
        2 => {
            let (cb2, cc2) = (cb * cb, cc * cc);
            -0.25 + (-4.0 * sb * cb2 * cb - 4.0 * sc * cc2 * cc + 5.0 * sb * cb + 5.0 * cc * sc) * SQRT3 / 8.0
                + (-4.0 * cc2 + 3.0) * cb2 * cb2 / 2.0
                + 2.0 * cc * sc * sb * cb2 * cb
                + (-16.0 * cc2 * cc2 + 24.0 * cc2 - 7.0) * cb2 / 8.0
                + 2.0 * sb * (cc2 - 1.5) * cc * sc * cb
                + 1.5 * cc2 * cc2
                - 7.0 * cc2 / 8.0
        }
        _ => {
            let (cb2, cc2) = (cb * cb, cc * cc);
            0.375 + (2.0 * sc * cc * cb2 + sb * (2.0 * cc2 - 1.0) * cb - sc * cc) * SQRT3 / 4.0
                + (2.0 * cc2 - 1.0) * cb2 / 4.0
                - sc * cc * cb * sb / 2.0
                - cc2 / 4.0
        }
    }
}

/// `H(b, c) = h(b, c) / sin⁴(b + c + φ)` on `[0, π/6]²`. Returns 0 at the
/// corner of regime 1, where `H` is bounded but has no limit.
pub fn regime_integrand(regime: u8, b: f64, c: f64) -> Result<f64> {
    let r = regime_index(regime)?;
    let s = (b + c + regime_phase(r)).sin();
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(numerator(r, b, c) / s.powi(4))
}

/// `∫∫_{[0,π/6]²} H`, with a node-doubling guard.
pub fn regime_integral(regime: u8) -> Result<f64> {
    let r = regime_index(regime)?;
    let a = PI / 6.0;
    let phase = regime_phase(r);
    let h = move |b: f64, c: f64| numerator(r, b, c) / (b + c + phase).sin().powi(4);
    let rule = |n: usize| {
        if r == 1 {
            integrate_square_corner(h, a, n)
        } else {
            integrate_rect(h, 0.0, a, 0.0, a, n)
        }
    };
    with_doubling_check(rule, REGIME_QUAD_NODES, REGIME_QUAD_TOL)
}

/// Closed forms of the three regime integrals.
pub fn regime_integral_closed_form(regime: u8) -> Result<f64> {
    Ok(match regime_index(regime)? {
        1 => -0.25 + PI * SQRT3 / 24.0 + LN_3 / 8.0,
        2 => 0.25 - 5.0 * LN_3 / 8.0 + PI * SQRT3 / 24.0 + LN_2 / 2.0,
        _ => LN_2 - LN_3 / 2.0,
    })
}

/// Squared distances of the deformed pair `(B, B')` and of the regular pair
/// (reference distance, squared) for grid angles `x = iπ/n`, `y = jπ/n`.
/// For regimes 1 and 2 the ratio is `B·B'/A²`; for regime 3 it is `B²/A²`.
pub fn regime_pair_distances(regime: u8, k: usize, i: usize, j: usize) -> Result<(f64, f64, f64)> {
    let r = regime_index(regime)?;
    if k == 0 {
        return invalid("k must be ≥ 1");
    }
    let n = 6 * k;
    let delta = PI / n as f64;
    let (x, y) = (PI * i as f64 / n as f64, PI * j as f64 / n as f64);
    let (sx, sy) = (x.sin(), y.sin());
    Ok(match r {
        1 => {
            let base = sx * sx + sy * sy;
            let b1 = base + 2.0 * sx * sy * (x + y - delta).cos();
            let b2 = base + 2.0 * sx * sy * (x + y + delta).cos();
            (b1, b2, (x + y).sin().powi(2))
        }
        2 => {
            let d = |e: f64| {
                let (u, v) = (PI / 6.0 + x - e, PI / 6.0 + y + e);
                (0.5 + u.cos() * sx + v.cos() * sy).powi(2) + (u.sin() * sx - v.sin() * sy).powi(2)
            };
            (d(delta), d(-delta), d(0.0))
        }
        _ => {
            let b = (x - y - delta / 2.0).cos().powi(2);
            (b, b, (x - y).cos().powi(2))
        }
    })
}

/// `log ∏_{1≤i,j≤k}` of the regime's distance ratio.
pub fn regime_log_product(regime: u8, k: usize) -> Result<f64> {
    regime_index(regime)?;
    if k == 0 {
        return invalid("k must be ≥ 1");
    }
    Ok(parallel_rows(k, |row| {
        let i = row + 1;
        let terms: Vec<f64> = (1..=k)
            .map(|j| {
                let (b1, b2, a) = regime_pair_distances(regime, k, i, j).expect("validated");
                b1.ln() + b2.ln() - 2.0 * a.ln()
            })
            .collect();
        pairwise_sum(&terms)
    }))
}

pub fn regime_product(regime: u8, k: usize) -> Result<f64> {
    Ok(regime_log_product(regime, k)?.exp())
}

/// Limit of [`regime_product`] as `k → ∞`.
pub fn regime_limit(regime: u8) -> Result<f64> {
    Ok(match regime_index(regime)? {
        1 => c1_closed_form(),
        2 => c2_closed_form(),
        _ => c3_closed_form(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    /// Truncated sum plus tail estimate.
    pub value: f64,
    pub truncated: f64,
    pub tail_estimate: f64,
    pub error_bound: f64,
}

/// `J = (32/π⁴) Σ_{r odd} (1 − 3r)/r⁴`, truncated at `r ≤ r_max`, with the
/// remainder estimated by the midpoint integral of the summand.
#[allow(non_snake_case)]
pub fn J_series(r_max: u64) -> Result<SeriesValue> {
    if r_max == 0 {
        return invalid("r_max must be ≥ 1");
    }
    let c = 32.0 / PI.powi(4);
    let terms: Vec<f64> = (0..)
        .map(|t| 2 * t + 1)
        .take_while(|&r| r <= r_max)
        .map(|r| {
            let r = r as f64;
            (1.0 - 3.0 * r) / r.powi(4)
        })
        .collect();
    let truncated = c * pairwise_sum(&terms);
    let last = if r_max % 2 == 1 { r_max } else { r_max - 1 } as f64;
    let a = last + 1.0;
    let tail_estimate = c * 0.5 * (1.0 / (3.0 * a.powi(3)) - 1.5 / (a * a));
    let error_bound = c * 4.0 / a.powi(4);
    Ok(SeriesValue { value: truncated + tail_estimate, truncated, tail_estimate, error_bound })
}

fn rho(fx: Complex64, fy: Complex64, ex: Complex64, ey: Complex64) -> Complex64 {
    (fx - fy) / (ex - ey)
}

/// `(1/N²) Σ_{i≠j} Re ρ(θ_i, θ_j)²` on the uniform grid `θ_i = 2πi/N`, with
/// `ρ(x, y) = (f(x) − f(y))/(e^{ix} − e^{iy})`, `f(x) = tri(3x) e^{ix}`.
pub fn j_riemann(grid_n: usize) -> Result<f64> {
    if grid_n < 8 || grid_n % 2 != 0 {
        return invalid(format!("grid_n must be even ≥ 8, got {grid_n}"));
    }
    let nf = grid_n as f64;
    let e: Vec<Complex64> = (0..grid_n).map(|i| Complex64::from_polar(1.0, 2.0 * PI * i as f64 / nf)).collect();
    let f: Vec<Complex64> = (0..grid_n).map(|i| tri(3.0 * 2.0 * PI * i as f64 / nf) * e[i]).collect();
    let s = parallel_rows(grid_n, |i| {
        let terms: Vec<f64> = (0..grid_n)
            .map(|j| if i == j { 0.0 } else { rho(f[i], f[j], e[i], e[j]).powi(2).re })
            .collect();
        pairwise_sum(&terms)
    });
    Ok(s / (nf * nf))
}

fn triwave_rho_data(n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if n < 8 || n % 2 != 0 {
        return invalid(format!("n must be even ≥ 8, got {n}"));
    }
    let zeta: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
    let gz: Vec<Complex64> =
        (0..n).map(|k| zeta[k] * triwave_profile(2.0 * PI * k as f64 / n as f64, 3)).collect();
    Ok((zeta, gz))
}

/// `(1/n²) Σ_{i≠j} Re ρ_ij²` with `ρ_ij = (g_i ζ_i − g_j ζ_j)/(ζ_i − ζ_j)` on
/// the angles of the triangular-wave configuration.
pub fn j_discrete(n: usize) -> Result<f64> {
    let (zeta, gz) = triwave_rho_data(n)?;
    let s = parallel_rows(n, |i| {
        let terms: Vec<f64> =
            (0..n).filter(|&j| j != i).map(|j| ((gz[i] - gz[j]) / (zeta[i] - zeta[j])).powi(2).re).collect();
        pairwise_sum(&terms)
    });
    Ok(s / (n * n) as f64)
}

/// `Σ_{i≠j} ρ_ij` (vanishes for π-antiperiodic profiles).
pub fn triwave_rho_sum(n: usize) -> Result<Complex64> {
    let (zeta, gz) = triwave_rho_data(n)?;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let (mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for j in (0..n).filter(|&j| j != i) {
            let r = (gz[i] - gz[j]) / (zeta[i] - zeta[j]);
            re.push(r.re);
            im.push(r.im);
        }
        total += Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
    }
    Ok(total)
}

/// Second-order prediction `−(n t_n)²/2 · J_discrete(n)` of `log Δ̄` for the
/// triangular wave with default amplitude.
pub fn triwave_prediction(n: usize) -> Result<f64> {
    let j = j_discrete(n)?;
    let nt = n as f64 * triwave_default_amplitude(n);
    Ok(-nt * nt / 2.0 * j)
}

/// `log` of the even-n lower bound, `7ζ(3)/24 − π⁴/864`.
pub fn triwave_limit_log() -> f64 {
    7.0 * zeta3().value / 24.0 - PI.powi(4) / 864.0
}

/// `R_k(x, y) = (e^{ikx} − e^{iky})/(e^{ix} − e^{iy})`.
pub fn r_k(k: i32, x: f64, y: f64) -> Complex64 {
    let kf = k as f64;
    (Complex64::from_polar(1.0, kf * x) - Complex64::from_polar(1.0, kf * y))
        / (Complex64::from_polar(1.0, x) - Complex64::from_polar(1.0, y))
}

/// `1 − |k − 1|` if `k + ℓ = 2`, else 0.
pub fn rk_expected(k: i32, l: i32) -> f64 {
    if k + l == 2 {
        1.0 - (k - 1).abs() as f64
    } else {
        0.0
    }
}

/// `(1/4π²) ∫∫_{[0,2π]²} R_k R_ℓ` by the `quad_n × quad_n` periodic
/// rectangle rule with the y-grid offset by half a step, so no node lies on
/// the diagonal. The integrand is a trigonometric polynomial of degree
/// `< |k| + |ℓ| + 2` per variable, so the rule is exact once `quad_n`
/// exceeds twice that.
pub fn rk_integral_check(k: i32, l: i32, quad_n: usize) -> Result<Complex64> {
    if k.abs() > 8 || l.abs() > 8 {
        return invalid(format!("|k|, |l| must be ≤ 8, got ({k}, {l})"));
    }
    if quad_n < 2 * (k.unsigned_abs() + l.unsigned_abs() + 2) as usize {
        return invalid(format!("quad_n = {quad_n} too small for exactness"));
    }
    let h = 2.0 * PI / quad_n as f64;
    let mut re = Vec::with_capacity(quad_n * quad_n);
    let mut im = Vec::with_capacity(quad_n * quad_n);
    for i in 0..quad_n {
        let x = i as f64 * h;
        for j in 0..quad_n {
            let y = (j as f64 + 0.5) * h;
            let v = r_k(k, x, y) * r_k(l, x, y);
            re.push(v.re);
            im.push(v.im);
        }
    }
    let scale = 1.0 / (quad_n * quad_n) as f64;
    Ok(Complex64::new(pairwise_sum(&re) * scale, pairwise_sum(&im) * scale))
}

/// Cosine coefficient `a_k = (2/π) ∫_0^π tri(x) cos(kx) dx` by Gauss–Legendre.
pub fn tri_fourier_coefficient(k: u32, quad_n: usize) -> f64 {
    2.0 / PI * integrate_1d(|x| tri(x) * (k as f64 * x).cos(), 0.0, PI, quad_n)
}

/// `8/(π² k²)` for odd k, 0 otherwise.
pub fn tri_fourier_expected(k: u32) -> f64 {
    if k % 2 == 1 {
        8.0 / (PI * PI * (k * k) as f64)
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineSumMax {
    pub n: usize,
    pub numeric_max: f64,
    pub argmax: f64,
    /// `1/sin(δ/2)`, `δ = π/n`.
    pub closed_form: f64,
    pub abs_error: f64,
}

/// `max_t Σ_{m=0}^{n−1} |cos(t − mδ)|` over `grid` equispaced points of `[0, π)`.
pub fn cosine_sum_max(n: usize, grid: usize) -> Result<CosineSumMax> {
    if n == 0 || grid == 0 {
        return invalid("n and grid must be ≥ 1");
    }
    use rayon::prelude::*;
    let delta = PI / n as f64;
    let (argmax, numeric_max) = (0..grid)
        .into_par_iter()
        .map(|i| {
            let t = PI * i as f64 / grid as f64;
            let s: f64 = (0..n).map(|m| (t - m as f64 * delta).cos().abs()).sum();
            (t, s)
        })
        .reduce(|| (0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
    let closed_form = 1.0 / (delta / 2.0).sin();
    Ok(CosineSumMax { n, numeric_max, argmax, closed_form, abs_error: (numeric_max - closed_form).abs() })
}

/// `log Δ̄` of the triangular wave for each odd frequency in `ms`.
pub fn triwave_frequency_sweep(n: usize, ms: &[usize]) -> Result<Vec<(usize, f64)>> {
    ms.iter()
        .map(|&m| {
            let t = crate::constructions::triwave(n, m, None)?;
            Ok((m, crate::geometry::log_normalized_discriminant(&t.config, false)?))
        })
        .collect()
}

fn report(name: &str, closed: f64, alt: f64, route: &str, tolerance: f64) -> ConstantReport {
    ConstantReport {
        name: name.to_string(),
        closed_form_value: closed,
        alt_route_value: alt,
        alt_route: route.to_string(),
        abs_discrepancy: (closed - alt).abs(),
        tolerance,
    }
}

/// Both routes for one of [`CONSTANT_NAMES`] (case-insensitive).
pub fn constant(name: &str) -> Result<ConstantReport> {
    let canonical = CONSTANT_NAMES
        .iter()
        .find(|c| c.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownName(format!("constant '{name}' (expected one of {CONSTANT_NAMES:?})")))?;
    let quad = |r: u8| -> Result<f64> { Ok((-regime_integral(r)?).exp()) };
    Ok(match *canonical {
        "C1" => report("C1", c1_closed_form(), quad(1)?, "exp(−∫∫H₁), 2-D Gauss–Legendre", 1e-8),
        "C2" => report("C2", c2_closed_form(), quad(2)?, "exp(−∫∫H₂), 2-D Gauss–Legendre", 1e-8),
        "C3" => report("C3", c3_closed_form(), quad(3)?, "exp(−∫∫H₃), 2-D Gauss–Legendre", 1e-8),
        "Cstar" => {
            let alt = (PI * PI / 8.0).exp() * quad(1)?.powi(3) * quad(2)?.powi(3) * quad(3)?.powf(1.5);
            report("Cstar", cstar_closed_form(), alt, "exp(π²/8)·C₁³C₂³C₃^{3/2} from quadrature", 1e-7)
        }
        "J" => {
            let s = J_series(J_SERIES_TERMS)?;
            report("J", j_closed_form(), s.value, "(32/π⁴) Σ_{r odd ≤ 10⁵} (1−3r)/r⁴ + tail", 1e-9)
        }
        _ => {
            let s = J_series(J_SERIES_TERMS)?;
            report("even_bound", even_bound_closed_form(), even_bound_from_j(s.value), "exp(−(π²/12)²·J/2), J by series", 1e-9)
        }
    })
}

/// Reports for all constants, in [`CONSTANT_NAMES`] order.
pub fn all_constants() -> Result<Vec<ConstantReport>> {
    CONSTANT_NAMES.iter().map(|n| constant(n)).collect()
}
