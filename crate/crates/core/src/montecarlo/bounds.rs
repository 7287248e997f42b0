//! Permutation counts for an `(epsilon, delta)` guarantee.
//!
//! `range` is the half-width `r` of the marginal-contribution interval:
//! every marginal contribution lies in `[-r, r]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub epsilon: f64,
    pub delta: f64,
    pub range: f64,
}

impl Tolerance {
    pub fn new(epsilon: f64, delta: f64, range: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::InvalidArgument(format!("range must be positive, got {range}")));
        }
        Ok(Self { epsilon, delta, range })
    }
}

/// `ceil(len^2 / (2 eps^2) * ln(2 n / delta))` for values confined to an
/// interval of length `len`.
pub fn hoeffding_count(n: usize, interval_len: f64, epsilon: f64, delta: f64) -> u64 {
    let t = interval_len * interval_len / (2.0 * epsilon * epsilon) * (2.0 * n as f64 / delta).ln();
    t.ceil().max(1.0) as u64
}

/// Hoeffding sample size for `n` players; the interval has length `2 r`.
pub fn hoeffding_permutations(n: usize, tol: &Tolerance) -> u64 {
    hoeffding_count(n, 2.0 * tol.range, tol.epsilon, tol.delta)
}

/// `h(u) = (1 + u) ln(1 + u) - u`.
pub fn bennett_h(u: f64) -> f64 {
    (1.0 + u) * u.ln_1p() - u
}

/// Lower bounds on the probability that the player at each rank has a zero
/// marginal contribution: 0 for the first `K` ranks, `(i - K)/i` after.
pub fn bennett_q(n: usize, k: usize) -> Vec<f64> {
    (1..=n).map(|i| if i <= k { 0.0 } else { (i - k) as f64 / i as f64 }).collect()
}

/// Left-hand side of the Bennett sample-size equation at `t` permutations,
/// with `extra` additional players that get no zero-probability credit.
pub fn bennett_lhs(t: f64, n: usize, k: usize, extra: usize, tol: &Tolerance) -> f64 {
    let r = tol.range;
    let free = (n.min(k) + extra) as f64 * (-t * bennett_h(tol.epsilon / r)).exp();
    let rest: f64 = (k + 1..=n)
        .map(|i| {
            let q = (i - k) as f64 / i as f64;
            let a = 1.0 - q * q;
            (-t * a * bennett_h(tol.epsilon / (a * r))).exp()
        })
        .sum();
    free + rest
}

/// Smallest `T` with `bennett_lhs(T) <= delta / 2`, by bisection on
/// `[1, 10 * hoeffding]`.
pub fn bennett_permutations(n: usize, k: usize, tol: &Tolerance) -> Result<u64> {
    bennett_permutations_with(n, k, 0, tol)
}

pub(crate) fn bennett_permutations_with(n: usize, k: usize, extra: usize, tol: &Tolerance) -> Result<u64> {
    let goal = tol.delta / 2.0;
    let lhs = |t: u64| bennett_lhs(t as f64, n, k, extra, tol);
    let mut lo = 1u64;
    let mut hi = 10 * hoeffding_permutations(n + extra, tol);
    if lhs(lo) <= goal {
        return Ok(lo);
    }
    if lhs(hi) > goal {
        return Err(Error::BracketExhausted { upper: hi });
    }
    // Invariant: lhs(lo) > goal >= lhs(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if lhs(mid) <= goal {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `ceil(ln(2K/delta) / h(epsilon / r))`; does not depend on `N`.
pub fn bennett_approx_permutations(k: usize, tol: &Tolerance) -> u64 {
    ((2.0 * k as f64 / tol.delta).ln() / bennett_h(tol.epsilon / tol.range)).ceil().max(1.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_example() {
        // interval length 1
        assert_eq!(hoeffding_count(100, 1.0, 0.1, 0.1), 381);
        assert_eq!(hoeffding_permutations(100, &Tolerance::new(0.1, 0.1, 0.5).unwrap()), 381);
    }

    #[test]
    fn hoeffding_scaling() {
        let a = hoeffding_count(1000, 1.0, 0.1, 0.1);
        let b = hoeffding_count(1000, 1.0, 0.2, 0.1);
        assert!((a as f64 / 4.0 - b as f64).abs() <= 1.0);
        let ln = |n: f64| (2.0 * n / 0.1f64).ln();
        let small = hoeffding_count(10, 1.0, 0.1, 0.1) as f64;
        let big = hoeffding_count(27, 1.0, 0.1, 0.1) as f64;
        let ratio = ln(27.0) / ln(10.0);
        assert!((big / small - ratio).abs() < 0.01);
    }

    #[test]
    fn q_vector() {
        assert_eq!(bennett_q(5, 2), vec![0.0, 0.0, 1.0 / 3.0, 0.5, 0.6]);
    }

    #[test]
    fn bennett_is_minimal_root() {
        let tol = Tolerance::new(0.1, 0.1, 1.0).unwrap();
        for n in [10, 100, 1000] {
            let t = bennett_permutations(n, 1, &tol).unwrap();
            assert!(bennett_lhs((2 * t) as f64, n, 1, 0, &tol) < tol.delta / 2.0);
            assert!(bennett_lhs(t as f64, n, 1, 0, &tol) <= tol.delta / 2.0);
            assert!(bennett_lhs((t - 1) as f64, n, 1, 0, &tol) > tol.delta / 2.0);
        }
    }

    #[test]
    fn approx_example() {
        let tol = Tolerance::new(0.1, 0.1, 1.0).unwrap();
        let h = 1.1 * 1.1f64.ln() - 0.1;
        assert_eq!(bennett_approx_permutations(1, &tol), (20f64.ln() / h).ceil() as u64);
        let lower = (1.0 / 0.01 * 20f64.ln()).ceil() as u64;
        assert!(bennett_approx_permutations(1, &tol) >= lower);
    }
}
