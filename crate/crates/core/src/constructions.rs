//! Explicit configurations: small-n extremal polygons, the dihedral family
//! for n = 6m, the arc polygon for n = 6k and the triangular-wave
//! perturbation of the regular polygon for even n.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{self, Point, PointConfig};
use crate::special::tri;

fn sqrt3() -> f64 {
    3f64.sqrt()
}

/// Regular n-gon with diameter exactly 2: circumradius 1 for even n and
/// `1/cos(π/2n)` for odd n. Vertex k sits at angle `2πk/n`.
pub fn regular_ngon(n: usize) -> Result<PointConfig> {
    if n < 2 {
        return invalid(format!("regular polygon needs n ≥ 2, got {n}"));
    }
    let r = if n % 2 == 0 { 1.0 } else { 1.0 / (PI / (2 * n) as f64).cos() };
    PointConfig::new((0..n).map(|k| Point::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect())
}

/// The optimal 4-point kite `z₁ = √3+i, z₂ = 0, z₃ = √3−i, z₄ = 2`.
pub fn kite4() -> PointConfig {
    let s = sqrt3();
    PointConfig::new(vec![Point::new(s, 1.0), Point::new(0.0, 0.0), Point::new(s, -1.0), Point::new(2.0, 0.0)])
        .expect("finite")
}

/// The optimal 6-point configuration: the kite plus `(√3−1)(1±i)`.
pub fn hexagon6() -> PointConfig {
    let s = sqrt3();
    let mut pts = kite4().into_points();
    pts.push(Point::new(s - 1.0, s - 1.0));
    pts.push(Point::new(s - 1.0, 1.0 - s));
    PointConfig::new(pts).expect("finite")
}

/// The stationary point of the path-shaped active set for n = 4, with
/// `Δ̄ = 1` and multipliers `λ₁₃ = λ₂₄ = 3/4`, `λ₂₃ = 0`.
pub fn path4_stationary() -> PointConfig {
    let s7 = 7f64.sqrt();
    PointConfig::new(vec![
        Point::new(1.25, s7 / 4.0),
        Point::new(0.0, 0.0),
        Point::new(1.5, -s7 / 2.0),
        Point::new(2.0, 0.0),
    ])
    .expect("finite")
}

/// Free points of a D₃-symmetric configuration with `6m` vertices.
/// `z[0] = z₁` is real and `z₀ = z₁ − 2` is implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralParams {
    pub m: usize,
    pub z: Vec<Point>,
}

fn omega() -> Point {
    Point::from_polar(1.0, 2.0 * PI / 3.0)
}

impl DihedralParams {
    pub fn new(m: usize, z: Vec<Point>) -> Result<Self> {
        if m == 0 || z.len() != m {
            return invalid(format!("dihedral family needs m ≥ 1 and exactly m free points (m={m}, got {})", z.len()));
        }
        if z.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return invalid("non-finite dihedral parameter");
        }
        Ok(Self { m, z })
    }

    /// `z_k` for `k = 0..=m`.
    pub fn zk(&self, k: usize) -> Point {
        if k == 0 {
            self.z[0] - 2.0
        } else {
            self.z[k - 1]
        }
    }

    /// Constraint residuals: `Im z₁`, `|z_{k+1} − z_k| − 2` for `1 ≤ k < m`,
    /// and `|z_m − e^{4πi/3} conj(z_m)| − 2`.
    pub fn residuals(&self) -> Vec<f64> {
        let mut r = vec![self.z[0].im];
        for k in 1..self.m {
            r.push((self.zk(k + 1) - self.zk(k)).norm() - 2.0);
        }
        let zm = self.zk(self.m);
        r.push((zm - omega() * omega() * zm.conj()).norm() - 2.0);
        r
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    /// Orbit representatives `A_m = {z₀, …, z_m} ∪ {conj z_k : 2 ≤ k ≤ m}`.
    pub fn representatives(&self) -> Vec<Point> {
        let mut a: Vec<Point> = (0..=self.m).map(|k| self.zk(k)).collect();
        a.extend((2..=self.m).map(|k| self.zk(k).conj()));
        a
    }

    /// All `6m` points `ω^t z`, `z ∈ A_m`, `t ∈ {0,1,2}`, grouped by representative.
    pub fn generate(&self) -> PointConfig {
        let w = omega();
        let pts = self
            .representatives()
            .into_iter()
            .flat_map(|z| [z, w * z, w * w * z])
            .collect();
        PointConfig::new(pts).expect("finite parameters")
    }
}

/// `log Δ` of the generated `6m` points from the factored orbit product
/// `Δ = (3^m |z₀||z₁||z₀³−z₁³| ∏_k |z_k|²|z₀³−z_k³|²|z₁³−z_k³|²|z_k³−conj z_k³| ∏_{j<k} |z_k³−z_j³|²|z_k³−conj z_j³|²)⁶`.
pub fn dihedral_delta(params: &DihedralParams, tol: f64) -> Result<f64> {
    let res = params.max_residual();
    if !(res <= tol) {
        return Err(Error::Infeasible(format!("dihedral constraints violated by {res:.3e} (tol {tol:.1e})")));
    }
    let ln = |p: Point| p.norm().ln();
    let z0 = params.zk(0);
    let z1 = params.zk(1);
    let c0 = z0 * z0 * z0;
    let c1 = z1 * z1 * z1;
    let mut terms = vec![params.m as f64 * 3f64.ln(), ln(z0), ln(z1), ln(c0 - c1)];
    for k in 2..=params.m {
        let zk = params.zk(k);
        let ck = zk * zk * zk;
        terms.push(2.0 * ln(zk));
        terms.push(2.0 * ln(c0 - ck));
        terms.push(2.0 * ln(c1 - ck));
        terms.push(ln(ck - ck.conj()));
        for j in 2..k {
            let zj = params.zk(j);
            let cj = zj * zj * zj;
            terms.push(2.0 * ln(ck - cj));
            terms.push(2.0 * ln(ck - cj.conj()));
        }
    }
    let inner: f64 = crate::summation::pairwise_sum(&terms);
    if inner.is_nan() {
        return Err(Error::Numerical("dihedral product is undefined".into()));
    }
    Ok(6.0 * inner)
}

/// The m = 1 member: `z₁ = 2/√3`.
pub fn dihedral_m1() -> DihedralParams {
    DihedralParams::new(1, vec![Point::new(2.0 / sqrt3(), 0.0)]).expect("valid")
}

/// The m = 2 member at angle α: `z₁ = (4 sin(π/3+α) − 2)/√3`, `z₂ = z₁ − 2e^{iα}`.
pub fn dihedral_m2(alpha: f64) -> DihedralParams {
    let z1 = (4.0 * (PI / 3.0 + alpha).sin() - 2.0) / sqrt3();
    DihedralParams::new(2, vec![Point::new(z1, 0.0), z1 - 2.0 * Point::from_polar(1.0, alpha)]).expect("valid")
}

fn m2_log_delta(alpha: f64) -> f64 {
    geometry::log_discriminant(&dihedral_m2(alpha).generate())
}

/// `d log Δ / dα` along the m = 2 family, by the chain rule through the
/// gradient with respect to the 12 generated points.
fn m2_log_delta_derivative(alpha: f64) -> f64 {
    let params = dihedral_m2(alpha);
    let cfg = params.generate();
    let grad = geometry::objective_gradient_complex(&cfg).expect("distinct points");
    let dz1 = Point::new(4.0 * (PI / 3.0 + alpha).cos() / sqrt3(), 0.0);
    let dz2 = dz1 - 2.0 * Point::i() * Point::from_polar(1.0, alpha);
    let w = omega();
    let reps = [dz1, dz1, dz2, dz2.conj()];
    let mut terms = Vec::with_capacity(12);
    for (r, dz) in reps.iter().enumerate() {
        for (t, rot) in [Point::new(1.0, 0.0), w, w * w].iter().enumerate() {
            let g = grad[3 * r + t];
            terms.push((g.conj() * rot * dz).re);
        }
    }
    crate::summation::pairwise_sum(&terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dodecagon {
    pub alpha: f64,
    pub cos_alpha: f64,
    pub log_delta_bar: f64,
    pub delta_bar: f64,
    /// `|d log Δ̄ / dα|` at the returned α.
    pub stationarity: f64,
    pub config: PointConfig,
}

/// Maximizes Δ along the m = 2 dihedral family over `α ∈ (0, π/6]`:
/// golden-section search, then bisection on the sign of `d log Δ/dα`.
pub fn dodecagon12() -> Dodecagon {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-3, PI / 6.0);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (m2_log_delta(c), m2_log_delta(d));
    while b - a > 1e-6 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = m2_log_delta(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = m2_log_delta(d);
        }
    }
    // widen until the derivative changes sign, then bisect
    let (mut lo, mut hi) = (a - 1e-5, b + 1e-5);
    while m2_log_delta_derivative(lo) <= 0.0 {
        lo -= 1e-4;
    }
    while m2_log_delta_derivative(hi) >= 0.0 {
        hi += 1e-4;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m2_log_delta_derivative(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let config = dihedral_m2(alpha).generate();
    let log_delta_bar = geometry::log_discriminant(&config) - 12.0 * 12f64.ln();
    Dodecagon {
        alpha,
        cos_alpha: alpha.cos(),
        log_delta_bar,
        delta_bar: log_delta_bar.exp(),
        stationarity: m2_log_delta_derivative(alpha).abs(),
        config,
    }
}

/// Equilateral 6k-gon `Y` with side `sin δ` (δ = π/n) built from six arcs of
/// the regular n-gon of unit diameter, and its rescaling `P` to diameter 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcPolygon {
    pub k: usize,
    pub n: usize,
    pub delta_angle: f64,
    pub y: PointConfig,
    pub p: PointConfig,
}

/// Exterior angle at `B_r` in units of δ: 1 at `B_k, B_3k, B_5k`, 3 at
/// `B_0, B_2k, B_4k`, 2 elsewhere.
pub fn arc_exterior_units(k: usize) -> Vec<u32> {
    (0..6 * k)
        .map(|r| match (r % k, (r / k) % 2) {
            (0, 1) => 1,
            (0, _) => 3,
            _ => 2,
        })
        .collect()
}

pub fn arc_polygon(k: usize) -> Result<ArcPolygon> {
    if k == 0 {
        return invalid("arc polygon needs k ≥ 1");
    }
    let n = 6 * k;
    let delta = PI / n as f64;
    let side = delta.sin();
    let ext = arc_exterior_units(k);
    let mut pts = Vec::with_capacity(n);
    let mut b = Point::new(0.0, 0.0);
    let mut turns = 0u32;
    for r in 0..n {
        if r > 0 {
            turns += ext[r];
        }
        pts.push(b);
        b += Point::from_polar(side, turns as f64 * delta);
    }
    let c = pts.iter().sum::<Point>() / n as f64;
    let y = PointConfig::new(pts.into_iter().map(|p| p - c).collect())?;
    let p = y.scaled(2.0 / (delta / 2.0).cos());
    Ok(ArcPolygon { k, n, delta_angle: delta, y, p })
}

/// Every third vertex of the 3n-vertex arc polygon, rescaled by `2/cos(π/6n)`.
pub fn sparse_arc(n: usize) -> Result<PointConfig> {
    if n % 2 != 0 || n < 4 {
        return invalid(format!("sparse arc polygon needs even n ≥ 4, got {n}"));
    }
    let arc = arc_polygon(n / 2)?;
    let pts: Vec<Point> = arc.y.points().iter().step_by(3).copied().collect();
    Ok(PointConfig::new(pts)?.scaled(2.0 / (PI / (6 * n) as f64).cos()))
}

/// `t_n = π²/(12n) · (1 − 1/n)`.
pub fn triwave_default_amplitude(n: usize) -> f64 {
    let nf = n as f64;
    PI * PI / (12.0 * nf) * (1.0 - 1.0 / nf)
}

/// `g(θ) = tri(mθ)`.
pub fn triwave_profile(theta: f64, m: usize) -> f64 {
    tri(m as f64 * theta)
}

/// `z_k = (1 + t g(θ_k)) e^{iθ_k}`, `θ_k = 2πk/n`. The second half is formed
/// as the exact negation of the first half's antipodal mirror, which holds
/// since g is π-antiperiodic for odd m.
pub fn triwave_points(n: usize, m: usize, t: f64) -> Vec<Point> {
    let half = n / 2;
    let mut pts = vec![Point::new(0.0, 0.0); n];
    for k in 0..half {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let zeta = Point::from_polar(1.0, theta);
        let g = triwave_profile(theta, m);
        pts[k] = zeta * (1.0 + t * g);
        pts[k + half] = -zeta * (1.0 - t * g);
    }
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriwaveConfig {
    pub n: usize,
    pub m_frequency: usize,
    pub amplitude: f64,
    pub config: PointConfig,
}

/// Largest pairwise distance and a pair attaining it.
fn farthest_pair(pts: &[Point]) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[i] - pts[j]).norm_sqr();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1, best.2.sqrt())
}

const FEAS_TOL: f64 = 1e-12;

/// Triangular-wave configuration. With `amplitude = None` the default
/// `t_n` is used for m = 3; for other m it is scaled by the largest factor
/// in (0, 1] that keeps all distances ≤ 2 (bisection).
pub fn triwave(n: usize, m_frequency: usize, amplitude: Option<f64>) -> Result<TriwaveConfig> {
    if n % 2 != 0 || n < 8 {
        return invalid(format!("n must be even ≥ 8, got {n}"));
    }
    if m_frequency % 2 == 0 {
        return invalid(format!("frequency m must be odd, got {m_frequency}"));
    }
    let t_n = triwave_default_amplitude(n);
    let feasible = |t: f64| farthest_pair(&triwave_points(n, m_frequency, t)).2 <= 2.0 + FEAS_TOL;
    let t = match amplitude {
        Some(t) if !t.is_finite() => return invalid("amplitude must be finite"),
        Some(t) => t,
        None if m_frequency == 3 || feasible(t_n) => t_n,
        None => {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid * t_n) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo * t_n
        }
    };
    let pts = triwave_points(n, m_frequency, t);
    let (i, j, d) = farthest_pair(&pts);
    if d > 2.0 + FEAS_TOL {
        return Err(Error::Infeasible(format!(
            "points {i} and {j} are {d:.15} apart (> 2) at amplitude {t}"
        )));
    }
    Ok(TriwaveConfig { n, m_frequency, amplitude: t, config: PointConfig::new(pts)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_diameters() {
        for n in 2..20 {
            let d = geometry::diameter(&regular_ngon(n).unwrap()).unwrap();
            assert!((d - 2.0).abs() < 1e-14, "n={n} d={d}");
        }
        assert!(regular_ngon(1).is_err());
    }

    #[test]
    fn exterior_angles_sum_to_full_turn() {
        for k in 1..10 {
            let total: u32 = arc_exterior_units(k).iter().sum();
            assert_eq!(total as usize, 2 * 6 * k);
        }
        assert_eq!(arc_exterior_units(1), vec![3, 1, 3, 1, 3, 1]);
    }

    #[test]
    fn dihedral_residuals() {
        assert!(dihedral_m1().max_residual() < 1e-15);
        for alpha in [0.1, 0.26, 0.5] {
            assert!(dihedral_m2(alpha).max_residual() < 1e-14);
        }
        assert!(DihedralParams::new(2, vec![Point::new(1.0, 0.0)]).is_err());
        let bad = DihedralParams::new(1, vec![Point::new(1.0, 0.0)]).unwrap();
        assert!(matches!(dihedral_delta(&bad, 1e-9), Err(Error::Infeasible(_))));
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let h = 1e-6;
        for alpha in [0.15, 0.26, 0.4] {
            let fd = (m2_log_delta(alpha + h) - m2_log_delta(alpha - h)) / (2.0 * h);
            let an = m2_log_delta_derivative(alpha);
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
        }
    }

    #[test]
    fn triwave_validation() {
        assert!(triwave(7, 3, None).is_err());
        assert!(triwave(6, 3, None).is_err());
        assert!(triwave(10, 2, None).is_err());
        assert!(matches!(triwave(20, 3, Some(0.5)), Err(Error::Infeasible(_))));
        let default5 = triwave(40, 5, None).unwrap();
        assert!(default5.amplitude > 0.0 && default5.amplitude <= triwave_default_amplitude(40));
    }
}
