//! Nonnegative least squares, `min ||A x - b||₂` subject to `x ≥ 0`
//! (Lawson–Hanson active-set method).

use nalgebra::{DMatrix, DVector};

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-13 * a.nrows().max(a.ncols()) as f64;
    svd.solve(b, cutoff).expect("SVD computed with both factors")
}

/// Unconstrained least squares via SVD (minimum-norm for rank-deficient `a`).
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    least_squares(a, b)
}

pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let p = a.ncols();
    let mut x = DVector::zeros(p);
    if p == 0 {
        return x;
    }
    let scale = a.abs().max().max(1e-300) * b.abs().max().max(1e-300);
    let tol = 1e-13 * scale * (a.nrows().max(p) as f64);
    let mut passive = vec![false; p];
    let mut outer = 0;
    loop {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..p).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = candidate else { break };
        if w[t] <= tol || outer > 3 * p {
            break;
        }
        outer += 1;
        passive[t] = true;
        for _ in 0..=3 * p {
            let idx: Vec<usize> = (0..p).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let s_sub = least_squares(&sub, b);
            let mut s = DVector::zeros(p);
            for (k, &j) in idx.iter().enumerate() {
                s[j] = s_sub[k];
            }
            if idx.iter().all(|&j| s[j] > 0.0) {
                x = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &j in &idx {
                if s[j] <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - s[j]));
                }
            }
            x += (s - &x) * alpha;
            for &j in &idx {
                if x[j] <= 1e-15 * x.amax().max(1.0) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}
