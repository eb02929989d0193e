//! First-order optimality at candidate maximizers: active set, nonnegative
//! multiplier recovery, stationarity residual and complementary slackness.
//!
//! Stationarity at point k reads
//! `Σ_{j≠k} 1/(z_j − z_k) = Σ_{j} λ_{jk} (conj z_j − conj z_k)`,
//! with the right-hand sum over active pairs containing k.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diamgraph::Edge;
use crate::error::{invalid, Result};
use crate::geometry::{Point, PointConfig};
use crate::nnls::nnls;

/// Residual threshold for a passing report.
pub const PASS_RESIDUAL: f64 = 1e-8;
/// Lower bound tolerated on recovered multipliers.
pub const MULTIPLIER_FLOOR: f64 = -1e-10;

/// Pairs with `|z_i − z_j|² ≥ 4 (1 − rel_tol)`.
pub fn active_set(cfg: &PointConfig, rel_tol: f64) -> Vec<Edge> {
    let pts = cfg.points();
    let threshold = 4.0 * (1.0 - rel_tol);
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if (pts[i] - pts[j]).norm_sqr() >= threshold {
                out.push((i, j));
            }
        }
    }
    out
}

/// Left-hand side `Σ_{j≠k} 1/(z_j − z_k)` for every k.
pub fn stationarity_lhs(cfg: &PointConfig) -> Result<Vec<Point>> {
    cfg.require_distinct()?;
    let pts = cfg.points();
    let mut lhs = vec![Point::new(0.0, 0.0); pts.len()];
    for k in 0..pts.len() {
        for j in k + 1..pts.len() {
            let r = (pts[j] - pts[k]).inv();
            lhs[k] += r;
            lhs[j] -= r;
        }
    }
    Ok(lhs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub pairs: Vec<Edge>,
    pub lambda: Vec<f64>,
    /// `max_k |LHS_k − RHS_k|`.
    pub residual_max: f64,
    pub residual_2norm: f64,
    /// False when the active set is empty, in which case the residual is the
    /// size of the left-hand side itself.
    pub stationarity_possible: bool,
}

impl Multipliers {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.pairs.iter().position(|&p| p == key).map(|i| self.lambda[i])
    }
}

fn residuals(pts: &[Point], lhs: &[Point], pairs: &[Edge], lambda: &[f64]) -> Vec<Point> {
    let mut r = lhs.to_vec();
    for (&(a, b), &l) in pairs.iter().zip(lambda) {
        let d = (pts[b] - pts[a]).conj() * l;
        r[a] -= d;
        r[b] += d;
    }
    r
}

/// Nonnegative least-squares fit of the multipliers on the given pairs.
pub fn recover_multipliers(cfg: &PointConfig, active: &[Edge]) -> Result<Multipliers> {
    let lhs = stationarity_lhs(cfg)?;
    let pts = cfg.points();
    let n = pts.len();
    let mut pairs: Vec<Edge> = active.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a == b || b >= n) {
        return invalid(format!("bad active pair {a}-{b}"));
    }
    let mut mat = DMatrix::zeros(2 * n, pairs.len());
    for (c, &(a, b)) in pairs.iter().enumerate() {
        // column for λ_ab: at a, conj(z_b − z_a); at b, conj(z_a − z_b)
        let d = (pts[b] - pts[a]).conj();
        mat[(2 * a, c)] = d.re;
        mat[(2 * a + 1, c)] = d.im;
        mat[(2 * b, c)] = -d.re;
        mat[(2 * b + 1, c)] = -d.im;
    }
    let rhs = DVector::from_iterator(2 * n, lhs.iter().flat_map(|p| [p.re, p.im]));
    let lambda: Vec<f64> = nnls(&mat, &rhs).iter().copied().collect();
    let r = residuals(pts, &lhs, &pairs, &lambda);
    let residual_max = r.iter().fold(0.0, |m: f64, p| m.max(p.norm()));
    let residual_2norm = r.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
    Ok(Multipliers { stationarity_possible: !pairs.is_empty(), pairs, lambda, residual_max, residual_2norm })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub active_set: Vec<Edge>,
    pub multipliers: Vec<f64>,
    pub stationarity_residual: f64,
    pub residual_2norm: f64,
    pub min_multiplier: f64,
    /// `max |λ_ab · g_ab|` over active pairs, `g_ab = |z_a − z_b|² − 4`.
    pub complementarity_violation: f64,
    /// Points with no incident active pair; stationarity is impossible there.
    pub isolated_points: Vec<usize>,
    pub passed: bool,
}

pub fn verify(cfg: &PointConfig, rel_tol: f64) -> Result<KktReport> {
    if cfg.len() < 2 {
        return invalid("KKT verification needs n ≥ 2");
    }
    cfg.require_distinct()?;
    let active = active_set(cfg, rel_tol);
    let mult = recover_multipliers(cfg, &active)?;
    let pts = cfg.points();
    let mut touched = vec![false; pts.len()];
    for &(a, b) in &active {
        touched[a] = true;
        touched[b] = true;
    }
    let isolated_points: Vec<usize> = (0..pts.len()).filter(|&k| !touched[k]).collect();
    let complementarity_violation = mult
        .pairs
        .iter()
        .zip(&mult.lambda)
        .map(|(&(a, b), &l)| (l * ((pts[a] - pts[b]).norm_sqr() - 4.0)).abs())
        .fold(0.0, f64::max);
    let min_multiplier = mult.lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let passed = mult.stationarity_possible
        && isolated_points.is_empty()
        && mult.residual_max < PASS_RESIDUAL
        && min_multiplier >= MULTIPLIER_FLOOR;
    Ok(KktReport {
        active_set: mult.pairs,
        multipliers: mult.lambda,
        stationarity_residual: mult.residual_max,
        residual_2norm: mult.residual_2norm,
        min_multiplier,
        complementarity_violation,
        isolated_points,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    #[test]
    fn path4_multipliers() {
        let cfg = constructions::path4_stationary();
        let m = recover_multipliers(&cfg, &[(0, 2), (1, 2), (1, 3)]).unwrap();
        assert!((m.get(1, 3).unwrap() - 0.75).abs() < 1e-10);
        assert!((m.get(0, 2).unwrap() - 0.75).abs() < 1e-10);
        assert!(m.get(1, 2).unwrap().abs() < 1e-10);
        assert!(m.residual_max < 1e-10);
    }

    #[test]
    fn empty_active_set_reports_gradient() {
        let cfg = PointConfig::from_xy(&[(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]).unwrap();
        let m = recover_multipliers(&cfg, &[]).unwrap();
        assert!(!m.stationarity_possible);
        let lhs = stationarity_lhs(&cfg).unwrap();
        let want = lhs.iter().fold(0.0, |a: f64, p| a.max(p.norm()));
        assert_eq!(m.residual_max, want);
        let rep = verify(&cfg, 1e-9).unwrap();
        assert!(!rep.passed);
    }

    #[test]
    fn coincident_rejected() {
        let cfg = PointConfig::from_xy(&[(0.0, 0.0), (0.0, 0.0), (2.0, 0.0)]).unwrap();
        assert!(verify(&cfg, 1e-9).is_err());
    }
}
