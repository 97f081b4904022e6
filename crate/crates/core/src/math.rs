//! Deterministic scalar math and summation helpers.

pub use core::f64::consts::{FRAC_PI_2, PI, TAU};
pub use libm::{acos, atan2, cbrt, ceil, cos, exp, floor, log, pow, round, sin, sqrt};

/// Pairwise (cascade) summation in slice order.
///
/// The tree shape depends only on the length, so the result is identical no
/// matter how the input was produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn pairwise_sum_by(n: usize, f: &dyn Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, f: &dyn Fn(usize) -> f64) -> f64 {
        if hi - lo <= 16 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, f)
}

/// Fractional part in `[0, 1)`.
pub fn fract(x: f64) -> f64 {
    x - floor(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum_by(1000, &|i| (i + 1) as f64), 500_500.0);
    }

    #[test]
    fn pairwise_empty_is_zero() {
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
