//! Special functions and constants computed from series.

use std::f64::consts::PI;

/// Value with an a-priori truncation bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub error_bound: f64,
}

/// ζ(3) from the alternating central-binomial series
/// `ζ(3) = 5/2 Σ_{k≥1} (-1)^{k+1} / (k³ C(2k,k))`.
/// The error bound is the first omitted term.
pub fn zeta3() -> Bounded {
    let mut sum = 0.0;
    let mut binom = 1.0; // C(2k, k), updated incrementally
    let mut k = 1u32;
    loop {
        let kf = k as f64;
        binom *= 2.0 * (2.0 * kf - 1.0) / kf;
        let term = 1.0 / (kf * kf * kf * binom);
        if term < 1e-20 {
            return Bounded { value: 2.5 * sum, error_bound: 2.5 * term };
        }
        sum += if k % 2 == 1 { term } else { -term };
        k += 1;
    }
}

/// Triangular wave `tri(x) = 1 - (2/π) arccos(cos x)`: 2π-periodic, even,
/// equal to `1 - 2|x|/π` on `[-π, π]`.
pub fn tri(x: f64) -> f64 {
    1.0 - 2.0 / PI * x.cos().clamp(-1.0, 1.0).acos()
}
