//! Evaluation of planar configurations: pairwise distances, the discriminant
//! (product of squared pairwise distances), normalization, diameter, convexity
//! and the gradient of the log-objective.
//!
//! Points are complex numbers. Products are always accumulated as sums of
//! logarithms; the plain value is only materialized when it fits in an `f64`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::summation::pairwise_sum;

pub type Point = Complex64;

/// Default relative tolerance for the convex-position test.
pub const DEFAULT_CONVEX_TOL: f64 = 1e-9;

/// An ordered list of planar points `z_1, ..., z_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    points: Vec<Point>,
}

impl PointConfig {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return invalid(format!("point {i} has a non-finite coordinate"));
        }
        Ok(Self { points })
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Result<Self> {
        Self::new(xy.iter().map(|&(x, y)| Point::new(x, y)).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_xy(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p.re, p.im]).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { points: self.points.iter().map(|p| p * s).collect() }
    }

    pub fn translated(&self, t: Point) -> Self {
        Self { points: self.points.iter().map(|p| p + t).collect() }
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Self {
        let r = Point::from_polar(1.0, angle);
        Self { points: self.points.iter().map(|p| p * r).collect() }
    }

    pub fn centroid(&self) -> Point {
        if self.points.is_empty() {
            return Point::new(0.0, 0.0);
        }
        self.points.iter().sum::<Point>() / self.points.len() as f64
    }

    /// Smallest pairwise distance, `+inf` for fewer than two points.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    pub fn is_distinct(&self) -> bool {
        self.min_distance() > 0.0
    }

    pub(crate) fn require_distinct(&self) -> Result<()> {
        for (i, a) in self.points.iter().enumerate() {
            for (j, b) in self.points.iter().enumerate().skip(i + 1) {
                if a == b {
                    return Err(Error::Singular(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }
}

/// Value of the discriminant in both linear and log scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discriminant {
    /// `None` when the value does not fit in an `f64` ("log-only").
    pub delta: Option<f64>,
    pub log_delta: f64,
}

/// Full evaluation summary of a configuration as given (no rescaling).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub delta: Option<f64>,
    pub log_delta: f64,
    pub delta_bar: f64,
    pub log_delta_bar: f64,
    pub diameter: f64,
}

fn materialize(log_value: f64) -> Option<f64> {
    if log_value == f64::NEG_INFINITY {
        return Some(0.0);
    }
    let v = log_value.exp();
    (v.is_finite() && v > 0.0).then_some(v)
}

/// `log Δ = Σ_{i<j} log |z_i - z_j|²`; `-inf` when two points coincide.
pub fn log_discriminant(cfg: &PointConfig) -> f64 {
    let pts = cfg.points();
    let mut terms = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1) / 2);
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d2 = (a - b).norm_sqr();
            if d2 == 0.0 {
                return f64::NEG_INFINITY;
            }
            terms.push(d2.ln());
        }
    }
    pairwise_sum(&terms)
}

/// `Δ(z) = ∏_{i<j} |z_i - z_j|²`. The empty product (n ≤ 1) is 1.
pub fn discriminant(cfg: &PointConfig) -> Discriminant {
    let log_delta = log_discriminant(cfg);
    Discriminant { delta: materialize(log_delta), log_delta }
}

fn log_n_pow_n(n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * (n as f64).ln()
    }
}

pub fn evaluate(cfg: &PointConfig) -> Result<EvalReport> {
    let n = cfg.len();
    let d = discriminant(cfg);
    let diameter = if n >= 2 { diameter(cfg)? } else { 0.0 };
    let log_delta_bar = d.log_delta - log_n_pow_n(n);
    Ok(EvalReport {
        n,
        delta: d.delta,
        log_delta: d.log_delta,
        delta_bar: log_delta_bar.exp(),
        log_delta_bar,
        diameter,
    })
}

/// `log Δ̄`, optionally after rescaling the configuration to diameter 2.
pub fn log_normalized_discriminant(cfg: &PointConfig, rescale: bool) -> Result<f64> {
    let n = cfg.len();
    if n == 0 {
        return invalid("normalized discriminant needs at least one point");
    }
    let mut log_delta = log_discriminant(cfg);
    if rescale && n >= 2 {
        let diam = diameter(cfg)?;
        if diam == 0.0 {
            return invalid("zero diameter");
        }
        // Δ(sP) = s^{n(n-1)} Δ(P) with s = 2 / diam
        log_delta += (n * (n - 1)) as f64 * (2.0 / diam).ln();
    }
    Ok(log_delta - log_n_pow_n(n))
}

/// `Δ̄ = Δ / nⁿ`, optionally after rescaling the configuration to diameter 2.
pub fn normalized_discriminant(cfg: &PointConfig, rescale: bool) -> Result<f64> {
    log_normalized_discriminant(cfg, rescale).map(f64::exp)
}

/// Indices `(i, j)`, `i < j`, of a pair realizing the diameter.
pub fn diameter_pair(cfg: &PointConfig) -> Result<(usize, usize, f64)> {
    let pts = cfg.points();
    if pts.len() < 2 {
        return invalid("diameter needs at least two points");
    }
    let mut best = (0, 1, -1.0);
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate().skip(i + 1) {
            let d2 = (a - b).norm_sqr();
            if d2 > best.2 {
                best = (i, j, d2);
            }
        }
    }
    Ok((best.0, best.1, best.2.sqrt()))
}

pub fn diameter(cfg: &PointConfig) -> Result<f64> {
    diameter_pair(cfg).map(|(_, _, d)| d)
}

/// Uniformly scaled copy (about the origin) with the requested diameter.
pub fn normalize_to_diameter(cfg: &PointConfig, target: f64) -> Result<PointConfig> {
    let diam = diameter(cfg)?;
    if diam == 0.0 {
        return invalid("cannot rescale a configuration of zero diameter");
    }
    if !(target > 0.0 && target.is_finite()) {
        return invalid(format!("target diameter must be positive, got {target}"));
    }
    let s = target / diam;
    if s == 1.0 {
        return Ok(cfg.clone());
    }
    Ok(cfg.scaled(s))
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Indices of the strict convex hull in counter-clockwise order. Points whose
/// turn is within `tol · diam²` of collinear are not counted as vertices.
pub fn convex_hull(cfg: &PointConfig, tol: f64) -> Result<Vec<usize>> {
    let pts = cfg.points();
    let n = pts.len();
    if n < 3 {
        return Ok((0..n).collect());
    }
    let diam = diameter(cfg)?;
    let eps = tol * diam * diam;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        pts[a].re.total_cmp(&pts[b].re).then(pts[a].im.total_cmp(&pts[b].im))
    });
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(order.iter()) } else { Box::new(order.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= eps
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    Ok(hull)
}

/// True iff every point is a vertex of the convex hull: no point lies inside
/// the hull or on the relative interior of a hull edge (within tolerance).
pub fn is_convex_position(cfg: &PointConfig, tol: f64) -> Result<bool> {
    if cfg.len() < 3 {
        return invalid("convex-position test needs at least three points");
    }
    cfg.require_distinct()?;
    Ok(convex_hull(cfg, tol)?.len() == cfg.len())
}

/// Gradient of `f(z) = Σ_{j<k} log |z_k - z_j|²` packed as `∂f/∂x_k + i ∂f/∂y_k`.
pub fn objective_gradient_complex(cfg: &PointConfig) -> Result<Vec<Point>> {
    cfg.require_distinct()?;
    let pts = cfg.points();
    let mut grad = vec![Point::new(0.0, 0.0); pts.len()];
    for k in 0..pts.len() {
        for j in k + 1..pts.len() {
            let d = pts[k] - pts[j];
            let g = d * (2.0 / d.norm_sqr());
            grad[k] += g;
            grad[j] -= g;
        }
    }
    Ok(grad)
}

/// Gradient of the log-objective as `[∂x_1, ∂y_1, ..., ∂x_n, ∂y_n]`.
pub fn objective_gradient(cfg: &PointConfig) -> Result<Vec<f64>> {
    Ok(objective_gradient_complex(cfg)?.into_iter().flat_map(|g| [g.re, g.im]).collect())
}
