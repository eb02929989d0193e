//! Order-stable summation for long log-space products.

const BLOCK: usize = 64;

/// Pairwise (tree) summation. The reduction order depends only on the slice
/// length, so results are reproducible bit-for-bit.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Tree reduction of per-row partial sums computed in parallel.
pub fn parallel_rows<F>(rows: usize, row_sum: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    let partial: Vec<f64> = (0..rows).into_par_iter().map(row_sum).collect();
    pairwise_sum(&partial)
}
