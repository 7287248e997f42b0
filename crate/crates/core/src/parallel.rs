//! Deterministic parallel reduction over queries.
//!
//! Work is split into fixed-size chunks whose partial sums are combined in
//! chunk order, so the result is bit-identical for any thread count.

use rayon::prelude::*;

use crate::error::Result;

pub(crate) const CHUNK: usize = 8;

/// Sums `f(j, out)` for `j in 0..count` into a vector of length `len`.
/// `f` adds its contribution into `out`.
pub(crate) fn sum_over<F>(count: usize, len: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync,
{
    let chunks: Vec<usize> = (0..count).step_by(CHUNK).collect();
    let partial: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&start| {
            let mut acc = vec![0.0; len];
            for j in start..(start + CHUNK).min(count) {
                f(j, &mut acc)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0.0; len];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok(total)
}

/// As [`sum_over`] with an extra scalar accumulated alongside.
pub(crate) fn sum_over_with_scalar<F>(count: usize, len: usize, f: F) -> Result<(Vec<f64>, f64)>
where
    F: Fn(usize, &mut [f64]) -> Result<f64> + Sync,
{
    let mut out = sum_over(count, len + 1, |j, acc| {
        let (head, tail) = acc.split_at_mut(len);
        tail[0] += f(j, head)?;
        Ok(())
    })?;
    let extra = out.pop().unwrap_or(0.0);
    Ok((out, extra))
}
