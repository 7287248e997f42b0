//! Hash parameter selection from the relative contrast.

use serde::{Deserialize, Serialize};

use super::collision::{collision_probability, g_exponent};
use super::contrast::{estimate_contrast, ContrastEstimate};
use crate::data::{Dataset, QuerySet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LshParams {
    /// Hash functions concatenated per table.
    pub m: usize,
    /// Number of tables.
    pub l: usize,
    /// Bucket width in data units.
    pub width: f64,
    pub seed: u64,
}

impl LshParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.l == 0 || !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "invalid LSH parameters m={} l={} width={}",
                self.m, self.l, self.width
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRequest {
    pub k_star: usize,
    /// Failure budget of a single query.
    pub delta_per_query: f64,
    /// Candidate widths in units of the mean distance.
    pub width_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub sample_size: usize,
    pub max_tables: usize,
    pub seed: u64,
}

impl ParamRequest {
    pub fn new(k_star: usize, delta_per_query: f64, seed: u64) -> Self {
        Self {
            k_star,
            delta_per_query,
            width_grid: vec![0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0],
            alpha_grid: vec![0.5, 1.0, 1.5, 2.0],
            sample_size: 1000,
            max_tables: 5000,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub params: LshParams,
    /// Contrast at rank `K*`, with the exponent at the chosen width.
    pub contrast: ContrastEstimate,
    pub alpha: f64,
    /// `(normalized width, g)` over the grid.
    pub g_by_width: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

/// Picks the width minimizing `g(C_{K*})`, then `m = ceil(alpha ln N /
/// ln(1/f(1)))` and `l = ceil(f(1/C)^{-m} ln(K*/delta'))` with the `alpha`
/// of lowest estimated query cost.
pub fn select_params(ds: &Dataset, queries: &QuerySet, req: &ParamRequest) -> Result<Selection> {
    if req.width_grid.is_empty() || req.alpha_grid.is_empty() {
        return Err(Error::InvalidArgument("width and alpha grids must be nonempty".into()));
    }
    if !(req.delta_per_query > 0.0 && req.delta_per_query < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {}", req.delta_per_query)));
    }
    let k_star = req.k_star.min(ds.len());
    let est = estimate_contrast(ds, queries, k_star, req.sample_size, req.seed)?;
    let g_by_width: Vec<(f64, f64)> = req.width_grid.iter().map(|&w| (w, g_exponent(est.contrast, w))).collect();
    let &(w_best, g_best) = g_by_width
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let mut warnings = Vec::new();
    if g_best >= 1.0 {
        warnings.push(format!(
            "g(C_K*) = {g_best:.4} >= 1 at every width (contrast {:.4}); LSH is not expected to beat exact valuation",
            est.contrast
        ));
    }

    let n = ds.len() as f64;
    let d = ds.dim() as f64;
    let p_far = collision_probability(1.0, w_best);
    let p_near = collision_probability(1.0 / est.contrast, w_best);
    let log_term = (k_star as f64 / req.delta_per_query).ln().max(f64::MIN_POSITIVE);
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let mut capped = false;
    for &alpha in &req.alpha_grid {
        let m = ((alpha * n.ln() / -p_far.ln()).ceil() as usize).max(1);
        let l_real = (p_near.powi(m as i32).recip() * log_term).ceil();
        let l = if l_real > req.max_tables as f64 {
            capped = true;
            req.max_tables
        } else {
            (l_real as usize).max(1)
        };
        let cost = l as f64 * (m as f64 * d + n * p_far.powi(m as i32));
        if best.is_none_or(|b| cost < b.0) {
            best = Some((cost, m, l, alpha));
        }
    }
    let (_, m, l, alpha) = best.expect("nonempty alpha grid");
    if capped && l == req.max_tables {
        warnings.push(format!("table count capped at {}; recall may fall short of the target", req.max_tables));
    }
    Ok(Selection {
        params: LshParams { m, l, width: w_best * est.d_mean.max(f64::MIN_POSITIVE), seed: req.seed },
        contrast: est.at_width(w_best),
        alpha,
        g_by_width,
        warnings,
    })
}
