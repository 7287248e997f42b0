//! Seeded synthetic datasets.
//!
//! Features always come from a Gaussian mixture: component centers are drawn
//! from `N(0, separation^2 I)` and points add unit Gaussian noise, so
//! `separation` controls how far apart the clusters sit and with it the
//! relative contrast of the data. Classification labels follow the
//! component; regression labels are a fixed random linear function of the
//! features plus Gaussian noise.

use knnsv::{Dataset, Labels, QuerySet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthKind {
    Classification { classes: u32 },
    Regression { noise: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub n: usize,
    pub n_test: usize,
    pub d: usize,
    /// Mixture components; component `c` has class `c % classes`.
    pub clusters: usize,
    pub separation: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn classification(n: usize, d: usize, classes: u32, seed: u64) -> Self {
        Self {
            kind: SynthKind::Classification { classes },
            n,
            n_test: 0,
            d,
            clusters: classes as usize,
            separation: 2.0,
            seed,
        }
    }

    pub fn regression(n: usize, d: usize, noise: f64, seed: u64) -> Self {
        Self { kind: SynthKind::Regression { noise }, n, n_test: 0, d, clusters: 1, separation: 0.0, seed }
    }

    pub fn with_test(mut self, n_test: usize) -> Self {
        self.n_test = n_test;
        self
    }

    pub fn with_clusters(mut self, clusters: usize) -> Self {
        self.clusters = clusters;
        self
    }

    pub fn with_separation(mut self, separation: f64) -> Self {
        self.separation = separation;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.n == 0 || self.d == 0 {
            return bad(format!("synthetic data needs n >= 1 and d >= 1, got n={} d={}", self.n, self.d));
        }
        if self.clusters == 0 {
            return bad("at least one cluster is required".into());
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return bad(format!("separation must be finite and nonnegative, got {}", self.separation));
        }
        match self.kind {
            SynthKind::Classification { classes: 0 } => bad("at least one class is required".into()),
            SynthKind::Regression { noise } if !(noise >= 0.0 && noise.is_finite()) => {
                bad(format!("label noise must be finite and nonnegative, got {noise}"))
            }
            _ => Ok(()),
        }
    }
}

/// Draws the training set and, when `n_test > 0`, queries from the same
/// distribution.
pub fn generate(cfg: &SynthConfig) -> Result<(Dataset, Option<QuerySet>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.d;
    let centers: Vec<f64> =
        (0..cfg.clusters * d).map(|_| cfg.separation * rng.sample::<f64, _>(StandardNormal)).collect();
    let coef: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal) / (d as f64).sqrt()).collect();
    let total = cfg.n + cfg.n_test;
    let mut x = Vec::with_capacity(total * d);
    let mut comp = Vec::with_capacity(total);
    for _ in 0..total {
        let c = rng.random_range(0..cfg.clusters);
        x.extend((0..d).map(|j| centers[c * d + j] + rng.sample::<f64, _>(StandardNormal)));
        comp.push(c);
    }
    let labels = match cfg.kind {
        SynthKind::Classification { classes } => Labels::Class(comp.iter().map(|&c| (c % classes as usize) as u32).collect()),
        SynthKind::Regression { noise } => {
            let eps = Normal::new(0.0, noise).map_err(|e| CliError::Usage(e.to_string()))?;
            Labels::Real(
                x.chunks_exact(d)
                    .map(|row| row.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>() + eps.sample(&mut rng))
                    .collect(),
            )
        }
    };
    let all = Dataset::new(x, d, labels)?;
    let train: Vec<usize> = (0..cfg.n).collect();
    let test: Vec<usize> = (cfg.n..total).collect();
    let ds = all.select(&train)?;
    let qs = if test.is_empty() { None } else { Some(QuerySet::from_dataset(all.select(&test)?)) };
    Ok((ds, qs))
}
