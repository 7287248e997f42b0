//! Relative-contrast estimation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::collision::g_exponent;
use crate::data::{Dataset, QuerySet};
use crate::error::{Error, Result};
use crate::neighbors::{check_dim, l2};

/// Default hash width in units of the mean distance.
pub const DEFAULT_NORMALIZED_WIDTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastEstimate {
    /// Mean distance between a random point and a random query.
    pub d_mean: f64,
    /// Mean distance from a query to its `k`-th nearest point.
    pub d_k: f64,
    pub contrast: f64,
    /// Normalized width the exponent was evaluated at.
    pub width: f64,
    pub g_exponent: f64,
}

impl ContrastEstimate {
    pub fn at_width(mut self, width: f64) -> Self {
        self.width = width;
        self.g_exponent = g_exponent(self.contrast, width);
        self
    }
}

/// Estimates `D_mean / D_k` from `sample_size` random point-query pairs and
/// up to `sample_size` queries. Deterministic for a fixed seed.
pub fn estimate_contrast(
    ds: &Dataset,
    queries: &QuerySet,
    k: usize,
    sample_size: usize,
    seed: u64,
) -> Result<ContrastEstimate> {
    if sample_size == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if k == 0 || k > ds.len() {
        return Err(Error::InvalidArgument(format!("rank {k} outside 1..={}", ds.len())));
    }
    check_dim(ds, queries.query(0).point)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..sample_size {
        let i = rng.random_range(0..ds.len());
        let j = rng.random_range(0..queries.len());
        total += l2(ds.row(i), queries.query(j).point);
    }
    let d_mean = total / sample_size as f64;

    let picks: Vec<usize> = if sample_size >= queries.len() {
        (0..queries.len()).collect()
    } else {
        rand::seq::index::sample(&mut rng, queries.len(), sample_size).into_vec()
    };
    let mut dist = vec![0.0; ds.len()];
    let mut sum_k = 0.0;
    for &j in &picks {
        let q = queries.query(j).point;
        for (i, d) in dist.iter_mut().enumerate() {
            *d = l2(ds.row(i), q);
        }
        let (_, kth, _) = dist.select_nth_unstable_by(k - 1, f64::total_cmp);
        sum_k += *kth;
    }
    let d_k = sum_k / picks.len() as f64;
    let contrast = if d_k > 0.0 { d_mean / d_k } else if d_mean > 0.0 { f64::INFINITY } else { 1.0 };
    Ok(ContrastEstimate { d_mean, d_k, contrast, width: 0.0, g_exponent: 0.0 }.at_width(DEFAULT_NORMALIZED_WIDTH))
}
