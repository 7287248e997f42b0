//! Sublinear approximate values from retrieved neighbors.

use super::index::LshIndex;
use super::params::{select_params, ParamRequest, Selection};
use crate::data::{Dataset, QuerySet, Target};
use crate::error::{Error, Result};
use crate::exact::{classification_cut, k_star, truncated_by_rank};
use crate::game::{GameSpec, Task};
use crate::parallel::sum_over_with_scalar;
use crate::result::{Method, ValuationResult};

/// Values of one query from its retrieved neighbors: the truncated
/// recursion over the first `min(K*, retrieved)` ranks, zero elsewhere.
/// Retrieving all `N` points reproduces the truncated values exactly.
pub(crate) fn values_from_retrieval(
    ds: &Dataset,
    neighbors: &[(usize, f64)],
    target: Target,
    k: usize,
    kstar: usize,
    out: &mut [f64],
) {
    let gains: Vec<f64> = neighbors
        .iter()
        .map(|&(i, _)| f64::from(u8::from(ds.label(i) == target)))
        .collect();
    let by_rank = if gains.len() == ds.len() {
        truncated_by_rank(&gains, k, kstar)
    } else {
        let cut = kstar.min(gains.len());
        if cut == 0 {
            return;
        }
        classification_cut(&gains[..cut], k, cut - 1)
    };
    for (&(i, _), v) in neighbors.iter().zip(by_rank) {
        out[i] += v;
    }
}

/// `(epsilon, delta)` approximate values for unweighted classification
/// using a prebuilt index.
pub fn shapley_lsh(
    ds: &Dataset,
    queries: &QuerySet,
    spec: &GameSpec,
    epsilon: f64,
    delta: f64,
    index: &LshIndex,
) -> Result<ValuationResult> {
    if spec.task != Task::Classification || spec.weighting.is_weighted() || spec.sellers.is_some() || spec.composite {
        return Err(Error::Unsupported(
            "LSH valuation covers unweighted point-level classification only".into(),
        ));
    }
    spec.validate(ds)?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let kstar = k_star(spec.k, epsilon);
    let (sum, candidates) = sum_over_with_scalar(queries.len(), ds.len(), |j, acc| {
        let q = queries.query(j);
        let r = index.retrieve(ds, q.point, kstar)?;
        values_from_retrieval(ds, &r.neighbors, q.target, spec.k, kstar, acc);
        Ok(r.candidates as f64)
    })?;
    let nq = queries.len() as f64;
    let mut res = ValuationResult::new(sum.into_iter().map(|v| v / nq).collect(), Method::Lsh)
        .with_guarantee(epsilon, delta);
    res.diagnostics.tables = Some(index.params().l);
    res.diagnostics.candidates_mean = Some(candidates / nq);
    Ok(res)
}

/// Selects parameters, builds the index and values the queries. The
/// per-query failure budget is `delta / N_test`.
pub fn value(
    ds: &Dataset,
    queries: &QuerySet,
    spec: &GameSpec,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<(ValuationResult, Selection)> {
    if spec.task != Task::Classification {
        return Err(Error::Unsupported("LSH valuation covers classification only".into()));
    }
    let req = ParamRequest::new(k_star(spec.k, epsilon), delta / queries.len() as f64, seed);
    let sel = select_params(ds, queries, &req)?;
    let index = LshIndex::build(ds, sel.params)?;
    let mut res = shapley_lsh(ds, queries, spec, epsilon, delta, &index)?;
    res.diagnostics.warnings.extend(sel.warnings.iter().cloned());
    Ok((res, sel))
}
