//! Multi-start maximization of `f(z) = Σ_{i<j} log |z_i − z_j|²` subject to
//! `|z_i − z_j| ≤ 2`, freely or with a prescribed diameter graph.
//!
//! Each start runs two phases:
//! 1. projected ascent: the gradient is projected off the cone spanned by the
//!    gradients of nearly active constraints (nonnegative least squares), a
//!    backtracking step is taken and the iterate is rescaled to diameter 2;
//! 2. Newton's method on the KKT system of the identified active set, with
//!    gauge rows removing translations and rotation.
//!
//! A converged point is perturbed and re-optimized a few times; a higher
//! value replaces it, which moves the search off saddle points.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constructions::regular_ngon;
use crate::diamgraph::{self, Edge, Graph};
use crate::error::{invalid, Result};
use crate::geometry::{self, Point, PointConfig};
use crate::kkt;
use crate::nnls::{lstsq, nnls};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub seed: u64,
    pub starts: usize,
    /// Projected-ascent iterations per start.
    pub max_iters: usize,
    pub step_init: f64,
    pub penalty_init: f64,
    pub penalty_growth: f64,
    /// Target stationarity residual.
    pub tol_gradient: f64,
    /// Allowed excess of any distance over 2.
    pub tol_constraint: f64,
    pub graph: Option<Graph>,
    pub keep_traces: bool,
    /// Perturb-and-reoptimize attempts after convergence.
    pub escape_trials: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 32,
            max_iters: 5_000,
            step_init: 1e-2,
            penalty_init: 10.0,
            penalty_growth: 10.0,
            tol_gradient: 1e-9,
            tol_constraint: 1e-12,
            graph: None,
            keep_traces: false,
            escape_trials: 2,
        }
    }
}

impl OptimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return invalid("starts must be ≥ 1");
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be ≥ 1");
        }
        for (name, v) in [
            ("step_init", self.step_init),
            ("penalty_init", self.penalty_init),
            ("tol_gradient", self.tol_gradient),
            ("tol_constraint", self.tol_constraint),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.penalty_growth > 1.0) {
            return invalid(format!("penalty_growth must exceed 1, got {}", self.penalty_growth));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientConverged,
    IterationCap,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub start: usize,
    pub log_delta_bar: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub kkt_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub n: usize,
    pub config: PointConfig,
    pub log_delta_bar: f64,
    pub delta_bar: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub active_set: Vec<Edge>,
    pub kkt_residual: f64,
    pub best_start: usize,
    /// Accepted-step values of the ascent objective for the best start.
    pub objective_trace: Vec<f64>,
    pub starts: Vec<StartSummary>,
    /// Per-start traces, kept when requested.
    pub traces: Option<Vec<Vec<f64>>>,
    pub requested_graph: Option<Graph>,
    /// Whether the achieved active set equals the requested graph.
    pub graph_achieved: Option<bool>,
    pub infeasible_graph: bool,
}

const BAND_INIT: f64 = 1e-3;
const ACTIVE_TOL: f64 = 1e-9;

fn pairs(n: usize) -> impl Iterator<Item = Edge> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn log_f(z: &[Point]) -> f64 {
    let mut s = 0.0;
    for (i, j) in pairs(z.len()) {
        s += (z[i] - z[j]).norm_sqr().ln();
    }
    s
}

fn grad_f(z: &[Point]) -> Vec<f64> {
    let mut g = vec![0.0; 2 * z.len()];
    for (i, j) in pairs(z.len()) {
        let d = z[i] - z[j];
        let c = 2.0 / d.norm_sqr();
        g[2 * i] += c * d.re;
        g[2 * i + 1] += c * d.im;
        g[2 * j] -= c * d.re;
        g[2 * j + 1] -= c * d.im;
    }
    g
}

fn min_dist_sq(z: &[Point]) -> f64 {
    pairs(z.len()).map(|(i, j)| (z[i] - z[j]).norm_sqr()).fold(f64::INFINITY, f64::min)
}

/// Squared distance below which a start is abandoned as collapsing.
const COLLAPSE_DIST_SQ: f64 = 1e-6;

fn max_dist_sq(z: &[Point]) -> f64 {
    pairs(z.len()).map(|(i, j)| (z[i] - z[j]).norm_sqr()).fold(0.0, f64::max)
}

/// Centers at the centroid and scales to diameter 2.
fn normalize(z: &mut [Point]) {
    let c = z.iter().sum::<Point>() / z.len() as f64;
    let s = 2.0 / max_dist_sq(z).sqrt();
    for p in z.iter_mut() {
        *p = (*p - c) * s;
    }
}

/// Ascent objective (augmented Lagrangian of the graph equalities):
/// `f − Σ_{e∈G} (ν_e g_e + (μ/2) g_e²)`.
struct Objective<'a> {
    graph_edges: &'a [Edge],
    nu: &'a [f64],
    mu: f64,
}

impl Objective<'_> {
    fn value(&self, z: &[Point]) -> f64 {
        let mut v = log_f(z);
        for (&(a, b), &nu) in self.graph_edges.iter().zip(self.nu) {
            let g = (z[a] - z[b]).norm_sqr() - 4.0;
            v -= nu * g + 0.5 * self.mu * g * g;
        }
        v
    }

    fn gradient(&self, z: &[Point]) -> Vec<f64> {
        let mut grad = grad_f(z);
        for (&(a, b), &nu) in self.graph_edges.iter().zip(self.nu) {
            let d = z[a] - z[b];
            let c = -(nu + self.mu * (d.norm_sqr() - 4.0)) * 2.0;
            grad[2 * a] += c * d.re;
            grad[2 * a + 1] += c * d.im;
            grad[2 * b] -= c * d.re;
            grad[2 * b + 1] -= c * d.im;
        }
        grad
    }
}

fn constraint_matrix(z: &[Point], set: &[Edge]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * z.len(), set.len());
    for (c, &(a, b)) in set.iter().enumerate() {
        let d = (z[a] - z[b]) * 2.0;
        m[(2 * a, c)] = d.re;
        m[(2 * a + 1, c)] = d.im;
        m[(2 * b, c)] = -d.re;
        m[(2 * b + 1, c)] = -d.im;
    }
    m
}

struct Projection {
    direction: Vec<f64>,
    norm: f64,
    support: Vec<Edge>,
}

/// Gradient minus its nonnegative combination of near-active constraint gradients.
fn project(z: &[Point], grad: &[f64], band: f64) -> Projection {
    let near: Vec<Edge> = pairs(z.len()).filter(|&(i, j)| (z[i] - z[j]).norm_sqr() >= 4.0 * (1.0 - band)).collect();
    let g = DVector::from_column_slice(grad);
    let a = constraint_matrix(z, &near);
    let lambda = nnls(&a, &g);
    let p = &g - &a * &lambda;
    let lmax = lambda.amax();
    let support = near.iter().zip(lambda.iter()).filter(|(_, &l)| l > 1e-9 * lmax.max(1e-300)).map(|(&e, _)| e).collect();
    let norm = p.amax();
    Projection { direction: p.iter().copied().collect(), norm, support }
}

enum AscentEnd {
    Converged,
    Stalled,
    Budget,
}

struct Ascent {
    end: AscentEnd,
    iterations: usize,
    support: Vec<Edge>,
}

/// Exit tolerances of the ascent phase in the given round; later rounds
/// tighten them when the Newton polish has failed.
fn ascent_tolerances(round: u32) -> (f64, f64) {
    let scale = 10f64.powi(-(round as i32));
    (1e-3 * scale, 1e-9 * scale)
}

fn ascend(
    z: &mut Vec<Point>,
    obj: &Objective,
    band: f64,
    step_init: f64,
    budget: usize,
    round: u32,
    trace: &mut Vec<f64>,
) -> Ascent {
    let (grad_tol, window_tol) = ascent_tolerances(round);
    let mut step = step_init;
    let mut value = obj.value(z);
    let mut iterations = 0;
    let mut support = Vec::new();
    let mut window_start = value;
    while iterations < budget {
        iterations += 1;
        let grad = obj.gradient(z);
        let proj = project(z, &grad, band);
        support = proj.support;
        if proj.norm < grad_tol {
            return Ascent { end: AscentEnd::Converged, iterations, support };
        }
        let mut accepted = false;
        while step > 1e-15 {
            let mut trial: Vec<Point> = z
                .iter()
                .enumerate()
                .map(|(k, p)| p + Point::new(proj.direction[2 * k], proj.direction[2 * k + 1]) * step)
                .collect();
            normalize(&mut trial);
            let v = obj.value(&trial);
            if v > value {
                *z = trial;
                value = v;
                trace.push(v);
                step = (step * 1.5).min(1.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Ascent { end: AscentEnd::Stalled, iterations, support };
        }
        if iterations % 200 == 0 {
            if value - window_start <= window_tol * value.abs().max(1.0) {
                return Ascent { end: AscentEnd::Stalled, iterations, support };
            }
            window_start = value;
        }
    }
    Ascent { end: AscentEnd::Budget, iterations, support }
}

fn pair_block(d: Point, c_iso: f64, c_dd: f64) -> [[f64; 2]; 2] {
    [[c_iso + c_dd * d.re * d.re, c_dd * d.re * d.im], [c_dd * d.re * d.im, c_iso + c_dd * d.im * d.im]]
}

fn add_pair_block(h: &mut DMatrix<f64>, a: usize, b: usize, blk: [[f64; 2]; 2], sign: f64) {
    for r in 0..2 {
        for c in 0..2 {
            let v = sign * blk[r][c];
            h[(2 * a + r, 2 * a + c)] += v;
            h[(2 * b + r, 2 * b + c)] += v;
            h[(2 * a + r, 2 * b + c)] -= v;
            h[(2 * b + r, 2 * a + c)] -= v;
        }
    }
}

fn kkt_residual_vec(z: &[Point], active: &[Edge], lambda: &[f64]) -> DVector<f64> {
    let n = z.len();
    let grad = grad_f(z);
    let gm = constraint_matrix(z, active);
    let mut r = DVector::zeros(2 * n + active.len());
    let lam = DVector::from_column_slice(lambda);
    let station = DVector::from_column_slice(&grad) - gm * lam;
    r.rows_mut(0, 2 * n).copy_from(&station);
    for (c, &(a, b)) in active.iter().enumerate() {
        r[2 * n + c] = (z[a] - z[b]).norm_sqr() - 4.0;
    }
    r
}

struct NewtonOut {
    z: Vec<Point>,
    lambda: Vec<f64>,
    iterations: usize,
}

enum NewtonEnd {
    Converged(NewtonOut),
    /// Pairs outside the active set pushed beyond distance 2.
    Violated(Vec<Edge>),
    Failed,
}

fn violations(z: &[Point], active: &[Edge], tol: f64) -> Vec<Edge> {
    pairs(z.len())
        .filter(|e| active.binary_search(e).is_err())
        .filter(|&(i, j)| (z[i] - z[j]).norm_sqr() > 4.0 * (1.0 + tol))
        .collect()
}

/// Newton's method on `∇f = Σ λ_a ∇g_a`, `g_a = 0` for `a ∈ active`
/// (`active` sorted).
fn newton(z0: &[Point], active: &[Edge], tol_constraint: f64) -> NewtonEnd {
    let n = z0.len();
    let m = active.len();
    let mut z = z0.to_vec();
    let grad = DVector::from_column_slice(&grad_f(&z));
    let mut lambda: Vec<f64> = lstsq(&constraint_matrix(&z, active), &grad).iter().copied().collect();
    let mut res = kkt_residual_vec(&z, active, &lambda);
    let tol = 1e-12 * (n as f64);
    for it in 0..60 {
        if res.amax() < tol {
            let bad = violations(&z, active, tol_constraint);
            if !bad.is_empty() {
                return NewtonEnd::Violated(bad);
            }
            return NewtonEnd::Converged(NewtonOut { z, lambda, iterations: it });
        }
        let mut jac = DMatrix::zeros(2 * n + m + 3, 2 * n + m);
        for (i, j) in pairs(n) {
            let d = z[i] - z[j];
            let r2 = d.norm_sqr();
            add_pair_block(&mut jac, i, j, pair_block(d, 2.0 / r2, -4.0 / (r2 * r2)), 1.0);
        }
        let gm = constraint_matrix(&z, active);
        for (c, &(a, b)) in active.iter().enumerate() {
            add_pair_block(&mut jac, a, b, pair_block(Point::new(0.0, 0.0), 2.0, 0.0), -lambda[c]);
        }
        for c in 0..m {
            for r in 0..2 * n {
                jac[(r, 2 * n + c)] = -gm[(r, c)];
                jac[(2 * n + c, r)] = gm[(r, c)];
            }
        }
        let centroid = z.iter().sum::<Point>() / n as f64;
        for k in 0..n {
            let rel = z[k] - centroid;
            jac[(2 * n + m, 2 * k)] = 1.0;
            jac[(2 * n + m + 1, 2 * k + 1)] = 1.0;
            jac[(2 * n + m + 2, 2 * k)] = -rel.im;
            jac[(2 * n + m + 2, 2 * k + 1)] = rel.re;
        }
        let mut rhs = DVector::zeros(2 * n + m + 3);
        rhs.rows_mut(0, 2 * n + m).copy_from(&(-&res));
        let step = lstsq(&jac, &rhs);
        let mut t = 1.0;
        let base = res.norm();
        let mut improved = false;
        for _ in 0..40 {
            let zt: Vec<Point> = (0..n).map(|k| z[k] + Point::new(step[2 * k], step[2 * k + 1]) * t).collect();
            let lt: Vec<f64> = (0..m).map(|c| lambda[c] + t * step[2 * n + c]).collect();
            if zt.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
                t *= 0.5;
                continue;
            }
            let rt = kkt_residual_vec(&zt, active, &lt);
            if rt.norm() < base || rt.amax() < tol {
                z = zt;
                lambda = lt;
                res = rt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            return NewtonEnd::Failed;
        }
        let bad = violations(&z, active, 1e-6);
        if !bad.is_empty() {
            return NewtonEnd::Violated(bad);
        }
    }
    NewtonEnd::Failed
}

struct StartOutcome {
    z: Vec<Point>,
    log_delta_bar: f64,
    iterations: usize,
    termination: Termination,
    kkt_residual: f64,
    trace: Vec<f64>,
    infeasible_graph: bool,
}

struct Searcher<'a> {
    n: usize,
    opts: &'a OptimizeOptions,
    graph_edges: Vec<Edge>,
}

struct LocalResult {
    z: Vec<Point>,
    value: f64,
    iterations: usize,
    termination: Termination,
    residual: f64,
    infeasible_graph: bool,
}

impl Searcher<'_> {
    fn is_graph_edge(&self, e: Edge) -> bool {
        self.graph_edges.binary_search(&e).is_ok()
    }

    /// Phases 1 and 2 from `z`, shrinking the near-active band on failure.
    fn local(&self, mut z: Vec<Point>, trace: &mut Vec<f64>) -> LocalResult {
        normalize(&mut z);
        let mut band = BAND_INIT;
        let mut mu = self.opts.penalty_init;
        let mut nu = vec![0.0; self.graph_edges.len()];
        let mut iterations = 0;
        let mut last_end = Termination::Stalled;
        let mut best_infeasible = true;
        for round in 0..8u32 {
            let obj = Objective { graph_edges: &self.graph_edges, nu: &nu, mu };
            let remaining = self.opts.max_iters.saturating_sub(iterations).max(1);
            let asc = ascend(&mut z, &obj, band, self.opts.step_init, remaining, round, trace);
            iterations += asc.iterations;
            last_end = match asc.end {
                AscentEnd::Budget => Termination::IterationCap,
                _ => Termination::Stalled,
            };
            let mut active: Vec<Edge> = asc.support.clone();
            active.extend(self.graph_edges.iter().copied());
            active.extend(pairs(self.n).filter(|&(i, j)| (z[i] - z[j]).norm_sqr() >= 4.0 * (1.0 - 1e-10)));
            active.sort_unstable();
            active.dedup();
            let mut tight: Vec<Edge> = self.graph_edges.clone();
            tight.extend(pairs(self.n).filter(|&(i, j)| (z[i] - z[j]).norm_sqr() >= 4.0 * (1.0 - 1e-10)));
            tight.sort_unstable();
            tight.dedup();
            let mut candidates = vec![active];
            if candidates[0] != tight {
                candidates.push(tight);
            }
            for attempt in candidates {
                if let Some(done) = self.polish(&z, attempt, &mut iterations, &mut best_infeasible) {
                    trace.push(done.value);
                    return done;
                }
            }
            if !self.graph_edges.is_empty() {
                let violation = self
                    .graph_edges
                    .iter()
                    .map(|&(a, b)| (z[a] - z[b]).norm_sqr() - 4.0)
                    .fold(0.0, |m: f64, g| m.max(g.abs()));
                for (k, &(a, b)) in self.graph_edges.iter().enumerate() {
                    nu[k] += mu * ((z[a] - z[b]).norm_sqr() - 4.0);
                }
                if violation > self.opts.tol_constraint {
                    mu *= self.opts.penalty_growth;
                }
            }
            band = (band * 0.1).max(1e-12);
            if matches!(asc.end, AscentEnd::Budget) || min_dist_sq(&z) < COLLAPSE_DIST_SQ {
                break;
            }
        }
        let value = log_f(&z);
        let residual = self.residual(&z);
        LocalResult {
            z,
            value,
            iterations,
            termination: last_end,
            residual,
            infeasible_graph: !self.graph_edges.is_empty() && best_infeasible,
        }
    }

    /// Newton polish on `attempt`, growing it by violated pairs and dropping
    /// pairs with negative multipliers.
    fn polish(
        &self,
        z: &[Point],
        mut attempt: Vec<Edge>,
        iterations: &mut usize,
        best_infeasible: &mut bool,
    ) -> Option<LocalResult> {
        for _ in 0..2 * self.n + 2 {
            let out = match newton(z, &attempt, self.opts.tol_constraint) {
                NewtonEnd::Converged(out) => out,
                NewtonEnd::Violated(extra) => {
                    attempt.extend(extra);
                    attempt.sort_unstable();
                    continue;
                }
                NewtonEnd::Failed => return None,
            };
            *iterations += out.iterations;
            let mut zn = out.z;
            *best_infeasible = false;
            let worst = attempt
                .iter()
                .zip(&out.lambda)
                .filter(|(&e, _)| !self.is_graph_edge(e))
                .min_by(|a, b| a.1.total_cmp(b.1));
            if let Some((&e, &l)) = worst {
                if l < -1e-10 {
                    attempt.retain(|&x| x != e);
                    continue;
                }
            }
            normalize(&mut zn);
            let value = log_f(&zn);
            let residual = self.residual(&zn);
            if residual <= self.opts.tol_gradient.max(1e-8) {
                return Some(LocalResult {
                    z: zn,
                    value,
                    iterations: *iterations,
                    termination: Termination::GradientConverged,
                    residual,
                    infeasible_graph: false,
                });
            }
            return None;
        }
        None
    }

    /// Stationarity residual: nonnegative multipliers off the graph, free
    /// multipliers on graph edges.
    fn residual(&self, z: &[Point]) -> f64 {
        let cfg = PointConfig::new(z.to_vec()).expect("finite");
        let mut active = kkt::active_set(&cfg, ACTIVE_TOL);
        if self.graph_edges.is_empty() {
            return kkt::recover_multipliers(&cfg, &active).map(|m| m.residual_max).unwrap_or(f64::INFINITY);
        }
        active.extend(self.graph_edges.iter().copied());
        active.sort_unstable();
        active.dedup();
        // real form ∇f = Σ λ ∇g; a free multiplier is split as λ⁺ − λ⁻
        let grad = DVector::from_column_slice(&grad_f(z));
        let gm = constraint_matrix(z, &active);
        let free: Vec<usize> = (0..active.len()).filter(|&c| self.is_graph_edge(active[c])).collect();
        let mut cols = gm.clone().resize_horizontally(active.len() + free.len(), 0.0);
        for (k, &c) in free.iter().enumerate() {
            cols.set_column(active.len() + k, &(-gm.column(c)));
        }
        let lam = nnls(&cols, &grad);
        let r = &grad - &cols * &lam;
        // halve to match the complex residual scale
        (0..z.len()).map(|k| 0.5 * (r[2 * k].powi(2) + r[2 * k + 1].powi(2)).sqrt()).fold(0.0, f64::max)
    }

    fn initial(&self, rng: &mut ChaCha8Rng) -> Vec<Point> {
        let n = self.n;
        let base = regular_ngon(n).expect("n ≥ 3").into_points();
        let slots: Vec<usize> = if self.graph_edges.is_empty() { (0..n).collect() } else { self.layout(rng) };
        (0..n)
            .map(|v| {
                let p = base[slots[v]];
                let r = p.norm() + rng.random_range(-0.1..0.1);
                let theta = p.arg() + rng.random_range(-PI / n as f64..PI / n as f64);
                Point::from_polar(r, theta)
            })
            .collect()
    }

    /// Slot assignment minimizing `Σ_{edges} (1 + cos Δθ)` by swap hill-climbing
    /// from a random permutation, so that graph edges join near-antipodal slots.
    fn layout(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = self.n;
        let mut slots: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            slots.swap(i, j);
        }
        let cost = |s: &[usize]| -> f64 {
            self.graph_edges
                .iter()
                .map(|&(a, b)| 1.0 + (2.0 * PI * (s[a] as f64 - s[b] as f64) / n as f64).cos())
                .sum()
        };
        let mut best = cost(&slots);
        loop {
            let mut improved = false;
            for i in 0..n {
                for j in i + 1..n {
                    slots.swap(i, j);
                    let c = cost(&slots);
                    if c < best - 1e-12 {
                        best = c;
                        improved = true;
                    } else {
                        slots.swap(i, j);
                    }
                }
            }
            if !improved {
                return slots;
            }
        }
    }

    fn run_start(&self, start: usize) -> StartOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        rng.set_stream(start as u64);
        let mut trace = Vec::new();
        let z0 = self.initial(&mut rng);
        let mut best = self.local(z0, &mut trace);
        let mut iterations = best.iterations;
        if best.termination == Termination::GradientConverged {
            let mut trials = 0;
            while trials < self.opts.escape_trials {
                trials += 1;
                let kick: Vec<Point> = best
                    .z
                    .iter()
                    .map(|p| p + Point::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3)))
                    .collect();
                let mut side = Vec::new();
                let cand = self.local(kick, &mut side);
                iterations += cand.iterations;
                if cand.termination == Termination::GradientConverged && cand.value > best.value + 1e-9 {
                    trace.extend(side.into_iter().filter(|&v| v > best.value));
                    best = cand;
                    trials = 0;
                }
            }
        }
        let n = self.n as f64;
        StartOutcome {
            log_delta_bar: best.value - n * n.ln(),
            z: best.z,
            iterations,
            termination: best.termination,
            kkt_residual: best.residual,
            trace,
            infeasible_graph: best.infeasible_graph,
        }
    }
}

fn run(n: usize, opts: &OptimizeOptions, graph: Option<&Graph>) -> Result<OptimizeResult> {
    opts.validate()?;
    if n < 3 {
        return invalid(format!("optimization needs n ≥ 3, got {n}"));
    }
    let graph_edges = match graph {
        Some(g) => {
            if g.n() != n {
                return invalid(format!("graph has {} vertices, expected {n}", g.n()));
            }
            if g.edge_count() > n {
                return invalid(format!("graph has {} edges, more than n = {n}", g.edge_count()));
            }
            g.edges().to_vec()
        }
        None => Vec::new(),
    };
    let searcher = Searcher { n, opts, graph_edges };
    let outcomes: Vec<StartOutcome> = (0..opts.starts).into_par_iter().map(|s| searcher.run_start(s)).collect();
    let better = |a: &StartOutcome, b: &StartOutcome| -> bool {
        let conv = |o: &StartOutcome| o.termination == Termination::GradientConverged;
        if conv(a) != conv(b) {
            return conv(a);
        }
        if (a.log_delta_bar - b.log_delta_bar).abs() > 1e-12 {
            return a.log_delta_bar > b.log_delta_bar;
        }
        a.kkt_residual < b.kkt_residual
    };
    let mut best = 0;
    for i in 1..outcomes.len() {
        if better(&outcomes[i], &outcomes[best]) {
            best = i;
        }
    }
    let starts = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| StartSummary {
            start: i,
            log_delta_bar: o.log_delta_bar,
            iterations: o.iterations,
            termination: o.termination,
            kkt_residual: o.kkt_residual,
        })
        .collect();
    let traces = opts.keep_traces.then(|| outcomes.iter().map(|o| o.trace.clone()).collect());
    let w = &outcomes[best];
    let config = PointConfig::new(w.z.clone())?;
    let active_set = kkt::active_set(&config, ACTIVE_TOL);
    let graph_achieved = graph.map(|g| active_set.as_slice() == g.edges());
    Ok(OptimizeResult {
        n,
        log_delta_bar: w.log_delta_bar,
        delta_bar: w.log_delta_bar.exp(),
        iterations: w.iterations,
        termination: w.termination,
        kkt_residual: w.kkt_residual,
        active_set,
        best_start: best,
        objective_trace: w.trace.clone(),
        starts,
        traces,
        requested_graph: graph.cloned(),
        graph_achieved,
        infeasible_graph: graph.is_some() && outcomes.iter().all(|o| o.infeasible_graph),
        config,
    })
}

/// Best local maximizer over `opts.starts` perturbed regular polygons.
pub fn maximize_free(n: usize, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    run(n, opts, None)
}

/// Local maximization with the edges of `graph` held at distance exactly 2.
pub fn maximize_with_graph(n: usize, graph: &Graph, opts: &OptimizeOptions) -> Result<OptimizeResult> {
    run(n, opts, Some(graph))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub label: String,
    pub graph: Graph,
    pub result: OptimizeResult,
}

/// Default upper limit on n for graph sweeps.
pub const SWEEP_CAP: usize = 12;

/// Runs [`maximize_with_graph`] over every caterpillar and odd-cycle-with-pendants
/// graph on n vertices, ranked by `log Δ̄` (highest first).
pub fn sweep_graphs(n: usize, opts: &OptimizeOptions) -> Result<Vec<SweepEntry>> {
    if n > SWEEP_CAP {
        return invalid(format!("sweep limited to n ≤ {SWEEP_CAP}"));
    }
    let mut jobs: Vec<(String, Graph)> = Vec::new();
    for c in diamgraph::enumerate_caterpillars(n)? {
        jobs.push((format!("caterpillar {:?}", c.spine_leaves), c.to_graph()));
    }
    for u in diamgraph::enumerate_unicyclic_candidates(n, n)? {
        jobs.push((format!("cycle {} pendants {:?}", u.cycle_len(), u.pendants), u.to_graph()));
    }
    let mut out = Vec::with_capacity(jobs.len());
    for (label, graph) in jobs {
        let result = maximize_with_graph(n, &graph, opts)?;
        out.push(SweepEntry { label, graph, result });
    }
    out.sort_by(|a, b| b.result.log_delta_bar.total_cmp(&a.result.log_delta_bar));
    // within runs of equal value, entries that realize their graph come first
    let mut start = 0;
    while start < out.len() {
        let head = out[start].result.log_delta_bar;
        let end = start + out[start..].iter().take_while(|e| head - e.result.log_delta_bar <= 1e-9).count();
        out[start..end].sort_by_key(|e| e.result.graph_achieved != Some(true));
        start = end;
    }
    Ok(out)
}

/// Canonical pose: centroid at the origin, farthest point on the positive
/// x-axis, second-farthest point in the closed upper half-plane.
pub fn gauge_fix(cfg: &PointConfig) -> PointConfig {
    gauge_fix_with(cfg, None)
}

fn gauge_fix_with(cfg: &PointConfig, anchor: Option<(usize, bool)>) -> PointConfig {
    let c = cfg.centroid();
    let pts: Vec<Point> = cfg.points().iter().map(|p| p - c).collect();
    if pts.is_empty() {
        return cfg.clone();
    }
    let far = anchor.map(|a| a.0).unwrap_or_else(|| {
        (0..pts.len()).max_by(|&a, &b| pts[a].norm().total_cmp(&pts[b].norm())).expect("nonempty")
    });
    let rot = if pts[far].norm() > 0.0 { pts[far].conj() / pts[far].norm() } else { Point::new(1.0, 0.0) };
    let mut rotated: Vec<Point> = pts.iter().map(|p| p * rot).collect();
    let reflect = match anchor {
        Some((_, r)) => r,
        None => {
            let second = (0..rotated.len())
                .filter(|&k| k != far)
                .max_by(|&a, &b| rotated[a].norm().total_cmp(&rotated[b].norm()));
            second.is_some_and(|s| rotated[s].im < 0.0)
        }
    };
    if reflect {
        for p in rotated.iter_mut() {
            *p = p.conj();
        }
    }
    PointConfig::new(rotated).expect("finite")
}

/// True if the two point sets are congruent (rigid motion and reflection,
/// any labeling) with per-coordinate tolerance `tol`.
pub fn congruent(a: &PointConfig, b: &PointConfig, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let target = gauge_fix(b);
    let ca = a.centroid();
    let radii: Vec<f64> = a.points().iter().map(|p| (p - ca).norm()).collect();
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let matches = |cand: &PointConfig| -> bool {
        let mut used = vec![false; target.len()];
        cand.points().iter().all(|p| {
            let hit = (0..target.len()).find(|&k| {
                !used[k] && (target.points()[k].re - p.re).abs() <= tol && (target.points()[k].im - p.im).abs() <= tol
            });
            if let Some(k) = hit {
                used[k] = true;
            }
            hit.is_some()
        })
    };
    (0..a.len())
        .filter(|&k| radii[k] >= rmax - 10.0 * tol)
        .any(|k| [false, true].iter().any(|&r| matches(&gauge_fix_with(a, Some((k, r))))))
}

/// Structure and KKT checks for an optimizer output.
pub fn structure_check(result: &OptimizeResult) -> Result<(diamgraph::StructureReport, kkt::KktReport)> {
    Ok((
        diamgraph::maximizer_structure_report(&result.config, ACTIVE_TOL)?,
        kkt::verify(&result.config, ACTIVE_TOL)?,
    ))
}

/// Convenience: `Δ̄` of the optimizer's configuration recomputed from scratch.
pub fn recompute_log_delta_bar(result: &OptimizeResult) -> Result<f64> {
    geometry::log_normalized_discriminant(&result.config, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions;

    #[test]
    fn newton_solves_kite_from_nearby() {
        let kite = constructions::kite4();
        let pts: Vec<Point> = kite.points().iter().enumerate().map(|(k, p)| p + Point::new(1e-4 * k as f64, -2e-4)).collect();
        let NewtonEnd::Converged(out) = newton(&pts, &[(0, 1), (0, 2), (1, 2), (1, 3)], 1e-12) else {
            panic!("Newton failed from a nearby start")
        };
        let cfg = PointConfig::new(out.z).unwrap();
        assert!(congruent(&cfg, &kite, 1e-9));
        assert!(out.lambda.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn options_validation() {
        let bad = OptimizeOptions { penalty_growth: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizeOptions { starts: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(maximize_free(2, &OptimizeOptions::default()).is_err());
    }

    #[test]
    fn congruence_detects_reflection_and_relabel() {
        let kite = constructions::kite4();
        let moved = PointConfig::new(kite.points().iter().rev().map(|p| p.conj() * Point::from_polar(1.0, 0.7) + 3.0).collect()).unwrap();
        assert!(congruent(&moved, &kite, 1e-12));
        assert!(!congruent(&constructions::regular_ngon(4).unwrap(), &kite, 1e-3));
    }
}
