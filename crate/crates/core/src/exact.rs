//! Exact Shapley values for KNN games.
//!
//! Each per-query routine works on ranks: values are computed from the
//! farthest point inwards and then scattered back to point order. The
//! unweighted recursions run in `O(N)` after the `O(N log N)` sort; the
//! weighted routine enumerates coalitions of size below `K` and is guarded
//! by a work budget.

use crate::combin::{binom, for_each_combination, subsets_up_to};
use crate::data::{Dataset, Query, QuerySet};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Task, Weighting};
use crate::parallel::{sum_over, sum_over_with_scalar};
use crate::result::{Method, ValuationResult};
use crate::utility::{RankedQuery, Scorer};

/// Default cap on the number of coalitions the weighted routine may
/// enumerate per adjacent pair.
pub const DEFAULT_WEIGHTED_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    pub epsilon: f64,
}

impl TruncationConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 || epsilon.is_infinite() {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    /// `max(K, ceil(1/epsilon))`.
    pub fn k_star(&self, k: usize) -> usize {
        k_star(k, self.epsilon)
    }
}

pub fn k_star(k: usize, epsilon: f64) -> usize {
    let inv = (1.0 / epsilon).ceil();
    if inv >= usize::MAX as f64 {
        usize::MAX
    } else {
        k.max(inv as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Coalition budget for the weighted and seller enumerations.
    pub budget: u64,
    pub seller_budget: u64,
    /// Run even when the budget estimate is exceeded.
    pub override_budget: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_WEIGHTED_BUDGET,
            seller_budget: crate::sellers::DEFAULT_SELLER_BUDGET,
            override_budget: false,
        }
    }
}

fn to_points(rq: &RankedQuery, by_rank: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; rq.len()];
    for (r, &v) in by_rank.iter().enumerate() {
        out[rq.neighbors.order[r]] = v;
    }
    out
}

fn scatter_add(rq: &RankedQuery, by_rank: &[f64], out: &mut [f64]) {
    for (r, &v) in by_rank.iter().enumerate() {
        out[rq.neighbors.order[r]] += v;
    }
}

fn ranked(ds: &Dataset, query: Query<'_>, spec: &GameSpec) -> Result<RankedQuery> {
    spec.validate(ds)?;
    RankedQuery::new(ds, query, spec.task)
}

// ---------------------------------------------------------------------------
// Unweighted classification

/// Values by rank for the unweighted classification game, where `m[r]` is
/// the match indicator of the point at rank `r`.
pub(crate) fn classification_by_rank(m: &[f64], k: usize) -> Vec<f64> {
    let n = m.len();
    classification_cut(m, k, n)
}

/// Recursion over the first `cut` ranks with the value at rank `cut` (1-based
/// `cut + 1`) taken as zero. `cut == m.len()` gives the exact values.
pub(crate) fn classification_cut(m: &[f64], k: usize, cut: usize) -> Vec<f64> {
    let n = m.len();
    let mut s = vec![0.0; n];
    if n == 0 {
        return s;
    }
    let kf = k as f64;
    let start = if cut >= n {
        s[n - 1] = m[n - 1] / n as f64;
        n - 1
    } else {
        cut
    };
    // 1-based i runs from start down to 1; s[i - 1] from s[i].
    for i in (1..=start).rev() {
        let next = if i < n { s[i] } else { 0.0 };
        s[i - 1] = next + (m[i - 1] - m[i]) / kf * (k.min(i) as f64) / i as f64;
    }
    s
}

pub fn shapley_unweighted_classification(ds: &Dataset, query: Query<'_>, k: usize) -> Result<Vec<f64>> {
    let rq = ranked(ds, query, &GameSpec::classification(k))?;
    Ok(to_points(&rq, &classification_by_rank(&rq.gains, k)))
}

/// Values by rank after truncating at `K*`: zero from rank `K*` on, the
/// exact recursion below. When `K* >= N` nothing is cut.
pub(crate) fn truncated_by_rank(m: &[f64], k: usize, kstar: usize) -> Vec<f64> {
    if kstar >= m.len() {
        classification_by_rank(m, k)
    } else {
        classification_cut(m, k, kstar - 1)
    }
}

pub fn shapley_truncated(
    ds: &Dataset,
    query: Query<'_>,
    k: usize,
    config: &TruncationConfig,
) -> Result<Vec<f64>> {
    let rq = ranked(ds, query, &GameSpec::classification(k))?;
    Ok(to_points(&rq, &truncated_by_rank(&rq.gains, k, config.k_star(k))))
}

// ---------------------------------------------------------------------------
// Unweighted regression

#[inline]
fn mn(a: usize, b: usize) -> f64 {
    a.min(b) as f64
}

/// Values by rank for the unweighted regression game with labels `y` in rank
/// order and target `t`.
pub(crate) fn regression_by_rank(y: &[f64], t: f64, k: usize) -> Vec<f64> {
    let n = y.len();
    let mut s = vec![0.0; n];
    if n == 0 {
        return s;
    }
    let kf = k as f64;
    let nf = n as f64;
    let total: f64 = y.iter().sum();
    let yn = y[n - 1];
    let mut base = -(yn / kf - t).powi(2) / nf;
    if n > 1 {
        let rest = (total - yn) / (nf - 1.0);
        base -= (kf - 1.0) / (nf * kf) * yn * (yn / kf - 2.0 * t + rest);
    }
    s[n - 1] = base;

    // g(l) = min(K, l-1) min(K-1, l-2) / ((l-1)(l-2)) for 1-based l >= 3.
    let g = |l: usize| mn(k, l - 1) * mn(k - 1, l - 2) / ((l - 1) as f64 * (l - 2) as f64);
    // prefix: sum of y_l over l < i. tail: sum of g(l) y_l over l >= i + 2.
    let mut prefix = total - yn;
    let mut tail = 0.0;
    for i in (1..n).rev() {
        // 1-based i; y_i = y[i - 1], y_{i+1} = y[i].
        prefix -= y[i - 1];
        if i + 2 <= n {
            tail += g(i + 2) * y[i + 1];
        }
        let below = if i > 1 { mn(k - 1, i - 1) / (i - 1) as f64 * prefix } else { 0.0 };
        let above = i as f64 / mn(k, i) * tail;
        let inner = below + y[i - 1] + y[i] + above;
        s[i - 1] = s[i] + (y[i] - y[i - 1]) / kf * (mn(k, i) / i as f64) * (inner / kf - 2.0 * t);
    }
    s
}

pub fn shapley_unweighted_regression(ds: &Dataset, query: Query<'_>, k: usize) -> Result<Vec<f64>> {
    let rq = ranked(ds, query, &GameSpec::regression(k))?;
    Ok(to_points(&rq, &regression_by_rank(&rq.gains, rq.target, k)))
}

// ---------------------------------------------------------------------------
// Composite games (analyst as an extra player)

/// Data-point values by rank for unweighted classification with the analyst
/// in the game.
pub(crate) fn composite_classification_by_rank(m: &[f64], k: usize) -> Vec<f64> {
    let n = m.len();
    let mut s = vec![0.0; n];
    if n == 0 {
        return s;
    }
    let kf = k as f64;
    let nf = n as f64;
    s[n - 1] = (kf + 1.0) / (2.0 * (nf + 1.0) * nf) * m[n - 1];
    for i in (1..n).rev() {
        let c = mn(i, k);
        let fi = i as f64;
        s[i - 1] = s[i] + (m[i - 1] - m[i]) / kf * c * (c + 1.0) / (2.0 * fi * (fi + 1.0));
    }
    s
}

/// Data-point values by rank for unweighted regression with the analyst in
/// the game.
pub(crate) fn composite_regression_by_rank(y: &[f64], t: f64, k: usize) -> Vec<f64> {
    let n = y.len();
    let mut s = vec![0.0; n];
    if n == 0 {
        return s;
    }
    let kf = k as f64;
    let nf = n as f64;
    let total: f64 = y.iter().sum();
    let yn = y[n - 1];
    let mut bracket = (kf + 2.0) * (kf - 1.0) / (2.0 * nf) * (yn / kf - 2.0 * t);
    if n > 1 {
        bracket += 2.0 * (kf - 1.0) * (kf + 1.0) / (3.0 * nf * (nf - 1.0)) * (total - yn);
    }
    s[n - 1] = -yn * bracket / (kf * (nf + 1.0)) - (yn / kf - t).powi(2) / (nf * (nf + 1.0));

    // Weight of y_l for l >= i + 2 (1-based l >= 3).
    let far = |l: usize| {
        2.0 * mn(k + 1, l) * mn(k, l - 1) * mn(k - 1, l - 2)
            / (3.0 * l as f64 * (l - 1) as f64 * (l - 2) as f64)
    };
    let mut prefix = total - yn;
    let mut tail = 0.0;
    for i in (1..n).rev() {
        prefix -= y[i - 1];
        if i + 2 <= n {
            tail += far(i + 2) * y[i + 1];
        }
        let fi = i as f64;
        let near = mn(k + 1, i + 1) * mn(k, i) / (2.0 * fi * (fi + 1.0));
        let below = if i > 1 {
            2.0 * mn(k + 1, i + 1) * mn(k, i) * mn(k - 1, i - 1) / (3.0 * (fi - 1.0) * fi * (fi + 1.0)) * prefix
        } else {
            0.0
        };
        let bracket = ((y[i] + y[i - 1]) / kf - 2.0 * t) * near + below / kf + tail / kf;
        s[i - 1] = s[i] + (y[i] - y[i - 1]) / kf * bracket;
    }
    s
}

// ---------------------------------------------------------------------------
// Weighted games

/// Coalition weights for the weighted recursion, shared across queries.
#[derive(Debug, Clone)]
pub(crate) struct WeightTable {
    n: usize,
    k: usize,
    /// Base case: weight of a coalition of size `s` joined by the last point.
    base: Vec<f64>,
    /// Difference step: weight of a coalition of size `s < K - 1`.
    low: Vec<f64>,
    /// Difference step, size `K - 1`: indexed by the 1-based max rank `r`
    /// of the coalition together with the adjacent pair.
    top: Vec<f64>,
}

impl WeightTable {
    pub(crate) fn new(n: usize, k: usize, composite: bool) -> Self {
        let nf = n as f64;
        let base = (0..k.min(n))
            .map(|s| {
                if composite {
                    1.0 / ((nf + 1.0) * binom(n, s + 1))
                } else {
                    1.0 / (nf * binom(n - 1, s))
                }
            })
            .collect();
        let mut low = Vec::new();
        let mut top = vec![0.0; n + 1];
        if n >= 2 {
            low = (0..(k - 1).min(n - 1))
                .map(|s| {
                    if composite {
                        1.0 / (nf * binom(n - 1, s + 1))
                    } else {
                        1.0 / ((nf - 1.0) * binom(n - 2, s))
                    }
                })
                .collect();
            for (r, t) in top.iter_mut().enumerate().skip(k + 1) {
                *t = tail_weight(n, k, r, composite);
            }
        }
        Self { n, k, base, low, top }
    }
}

/// Sum over coalitions that extend a size-`K-1` core with members ranked
/// beyond `r`; all of them give the same utility difference.
fn tail_weight(n: usize, k: usize, r: usize, composite: bool) -> f64 {
    let free = n - r;
    let (mut term, scale) = if composite {
        (1.0 / binom(n - 1, k), n as f64)
    } else {
        (1.0 / binom(n - 2, k - 1), (n - 1) as f64)
    };
    let mut sum = term;
    for j in 0..free {
        let ratio = if composite {
            (free - j) as f64 * (j + k + 1) as f64 / ((j + 1) as f64 * (n - 1 - j - k) as f64)
        } else {
            (free - j) as f64 * (j + k) as f64 / ((j + 1) as f64 * (n - 1 - j - k) as f64)
        };
        term *= ratio;
        sum += term;
    }
    sum / scale
}

/// Values by rank for a weighted (or any) KNN game via coalition
/// enumeration over the adjacent-pair difference identity.
pub(crate) fn weighted_by_rank(rq: &RankedQuery, weighting: &Weighting, k: usize, table: &WeightTable) -> Vec<f64> {
    let n = rq.len();
    debug_assert_eq!(n, table.n);
    debug_assert_eq!(k, table.k);
    let mut scorer = Scorer::new(rq, weighting, k);
    let mut s = vec![0.0; n];
    let mut buf: Vec<usize> = Vec::with_capacity(k + 1);

    // Base case: the farthest point joins coalitions of size < K.
    let last = n - 1;
    let mut base = 0.0;
    for (size, &w) in table.base.iter().enumerate() {
        let mut acc = 0.0;
        for_each_combination(n - 1, size, |c| {
            buf.clear();
            buf.extend_from_slice(c);
            let without = scorer.score_sorted(&buf);
            buf.push(last);
            acc += scorer.score_sorted(&buf) - without;
        });
        base += w * acc;
    }
    s[last] = base;

    if n < 2 {
        return s;
    }
    let max_size = (k - 1).min(n - 2);
    for a in (0..n - 1).rev() {
        // Adjacent pair (a, a + 1), 0-based ranks.
        let mut diff = 0.0;
        for size in 0..=max_size {
            for_each_combination(n - 2, size, |c| {
                buf.clear();
                buf.extend(c.iter().map(|&x| if x < a { x } else { x + 2 }));
                let pos = buf.partition_point(|&x| x < a);
                buf.insert(pos, a);
                let with_a = scorer.score_sorted(&buf);
                buf[pos] = a + 1;
                let with_b = scorer.score_sorted(&buf);
                let w = if size + 1 < k {
                    table.low[size]
                } else {
                    // 1-based max rank over the core and the pair.
                    let core_max = c.last().map_or(0, |&x| if x < a { x + 1 } else { x + 3 });
                    table.top[core_max.max(a + 2)]
                };
                diff += w * (with_a - with_b);
            });
        }
        s[a] = s[a + 1] + diff;
    }
    s
}

/// Estimated coalition count per adjacent pair of the weighted routine.
pub fn weighted_work(n: usize, k: usize) -> f64 {
    subsets_up_to(n.saturating_sub(2), k - 1)
}

fn check_budget(n: usize, k: usize, opts: &ExactOptions) -> Result<()> {
    let est = weighted_work(n, k);
    if est > opts.budget as f64 && !opts.override_budget {
        return Err(Error::BudgetExceeded { estimated: est, budget: opts.budget });
    }
    Ok(())
}

pub fn shapley_weighted(ds: &Dataset, query: Query<'_>, spec: &GameSpec, opts: &ExactOptions) -> Result<Vec<f64>> {
    check_budget(ds.len(), spec.k, opts)?;
    let rq = ranked(ds, query, spec)?;
    let table = WeightTable::new(ds.len(), spec.k, false);
    Ok(to_points(&rq, &weighted_by_rank(&rq, &spec.weighting, spec.k, &table)))
}

fn full_utility(rq: &RankedQuery, spec: &GameSpec) -> f64 {
    let all: Vec<usize> = (0..rq.len().min(spec.k)).collect();
    Scorer::new(rq, &spec.weighting, spec.k).score_sorted(&all)
}

/// Composite game values `(data values, analyst value)` for one query.
/// Dispatches to the seller-level routine when the spec has a seller map.
pub fn shapley_composite(
    ds: &Dataset,
    query: Query<'_>,
    spec: &GameSpec,
    opts: &ExactOptions,
) -> Result<(Vec<f64>, f64)> {
    if spec.sellers.is_some() {
        let spec = spec.clone().composite(true);
        return crate::sellers::shapley_per_seller_composite(ds, query, &spec, opts);
    }
    if spec.weighting.is_weighted() {
        check_budget(ds.len(), spec.k, opts)?;
    }
    let rq = ranked(ds, query, spec)?;
    let table = spec.weighting.is_weighted().then(|| WeightTable::new(ds.len(), spec.k, true));
    let by_rank = composite_point_by_rank(&rq, spec, table.as_ref());
    let analyst = full_utility(&rq, spec) - by_rank.iter().sum::<f64>();
    Ok((to_points(&rq, &by_rank), analyst))
}

fn composite_point_by_rank(rq: &RankedQuery, spec: &GameSpec, table: Option<&WeightTable>) -> Vec<f64> {
    match (&spec.weighting, spec.task) {
        (Weighting::Weighted(_), _) => {
            weighted_by_rank(rq, &spec.weighting, spec.k, table.expect("weight table"))
        }
        (Weighting::Unweighted, Task::Classification) => composite_classification_by_rank(&rq.gains, spec.k),
        (Weighting::Unweighted, Task::Regression) => composite_regression_by_rank(&rq.gains, rq.target, spec.k),
    }
}

fn point_by_rank(rq: &RankedQuery, spec: &GameSpec, table: Option<&WeightTable>) -> Vec<f64> {
    match (&spec.weighting, spec.task) {
        (Weighting::Weighted(_), _) => weighted_by_rank(rq, &spec.weighting, spec.k, table.expect("weight table")),
        (Weighting::Unweighted, Task::Classification) => classification_by_rank(&rq.gains, spec.k),
        (Weighting::Unweighted, Task::Regression) => regression_by_rank(&rq.gains, rq.target, spec.k),
    }
}

/// Exact values for one query and any point-level game.
pub fn shapley_exact(ds: &Dataset, query: Query<'_>, spec: &GameSpec, opts: &ExactOptions) -> Result<Vec<f64>> {
    if spec.sellers.is_some() {
        return crate::sellers::shapley_per_seller(ds, query, spec, opts);
    }
    if spec.weighting.is_weighted() {
        return shapley_weighted(ds, query, spec, opts);
    }
    let rq = ranked(ds, query, spec)?;
    Ok(to_points(&rq, &point_by_rank(&rq, spec, None)))
}

fn method_for(spec: &GameSpec) -> Method {
    if spec.composite {
        Method::Composite
    } else if spec.sellers.is_some() {
        Method::Seller
    } else if spec.weighting.is_weighted() {
        Method::Weighted
    } else {
        Method::Exact
    }
}

/// Exact values averaged over a query set, for every game the spec can
/// describe: unweighted, weighted, seller-level and composite.
pub fn value(ds: &Dataset, queries: &QuerySet, spec: &GameSpec, opts: &ExactOptions) -> Result<ValuationResult> {
    spec.validate(ds)?;
    if queries.dim() != ds.dim() {
        return Err(Error::DimensionMismatch { expected: ds.dim(), found: queries.dim() });
    }
    let nq = queries.len() as f64;
    if spec.sellers.is_some() {
        let m = spec.players(ds);
        let (sum, analyst) = if spec.composite {
            crate::sellers::check_budget(m, spec.k, opts)?;
            sum_over_with_scalar(queries.len(), m, |j, acc| {
                let (v, a) = crate::sellers::shapley_per_seller_composite(ds, queries.query(j), spec, opts)?;
                add(acc, &v);
                Ok(a)
            })?
        } else {
            crate::sellers::check_budget(m, spec.k, opts)?;
            let sum = sum_over(queries.len(), m, |j, acc| {
                add(acc, &crate::sellers::shapley_per_seller(ds, queries.query(j), spec, opts)?);
                Ok(())
            })?;
            (sum, 0.0)
        };
        return Ok(finish(sum, nq, spec.composite.then_some(analyst / nq), method_for(spec)));
    }

    if spec.weighting.is_weighted() {
        check_budget(ds.len(), spec.k, opts)?;
    }
    let table = spec.weighting.is_weighted().then(|| WeightTable::new(ds.len(), spec.k, spec.composite));
    let (sum, analyst) = sum_over_with_scalar(queries.len(), ds.len(), |j, acc| {
        let rq = RankedQuery::new(ds, queries.query(j), spec.task)?;
        if spec.composite {
            let by_rank = composite_point_by_rank(&rq, spec, table.as_ref());
            scatter_add(&rq, &by_rank, acc);
            Ok(full_utility(&rq, spec) - by_rank.iter().sum::<f64>())
        } else {
            scatter_add(&rq, &point_by_rank(&rq, spec, table.as_ref()), acc);
            Ok(0.0)
        }
    })?;
    Ok(finish(sum, nq, spec.composite.then_some(analyst / nq), method_for(spec)))
}

/// Truncated classification values averaged over a query set.
pub fn value_truncated(
    ds: &Dataset,
    queries: &QuerySet,
    k: usize,
    config: &TruncationConfig,
) -> Result<ValuationResult> {
    let spec = GameSpec::classification(k);
    spec.validate(ds)?;
    if queries.dim() != ds.dim() {
        return Err(Error::DimensionMismatch { expected: ds.dim(), found: queries.dim() });
    }
    let kstar = config.k_star(k);
    let sum = sum_over(queries.len(), ds.len(), |j, acc| {
        let rq = RankedQuery::new(ds, queries.query(j), Task::Classification)?;
        scatter_add(&rq, &truncated_by_rank(&rq.gains, k, kstar), acc);
        Ok(())
    })?;
    Ok(finish(sum, queries.len() as f64, None, Method::Truncated).with_guarantee(config.epsilon, 0.0))
}

fn add(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn finish(mut sum: Vec<f64>, nq: f64, analyst: Option<f64>, method: Method) -> ValuationResult {
    sum.iter_mut().for_each(|v| *v /= nq);
    let mut res = ValuationResult::new(sum, method);
    res.analyst_value = analyst;
    res
}
