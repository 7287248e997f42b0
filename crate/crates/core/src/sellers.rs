//! Seller-level values when one curator owns several points.
//!
//! A seller coalition is worth the utility of the `K` nearest points it
//! holds. Coalitions are grouped by that top-`K` set: each set is reached
//! from exactly one minimal seller coalition (the owners of its points),
//! plus any number of sellers whose nearest point lies beyond it. The
//! enumeration therefore visits seller subsets of size at most `K` and
//! weights each marginal contribution by a closed-form count of the
//! coalitions that share it.

use crate::combin::{binom, for_each_combination, subsets_up_to};
use crate::data::{Dataset, Query};
use crate::error::{Error, Result};
use crate::exact::{self, ExactOptions};
use crate::game::{GameSpec, SellerMap, Task, Weighting};
use crate::utility::{RankedQuery, Scorer};

pub const DEFAULT_SELLER_BUDGET: u64 = 1_000_000;

/// Seller subsets visited per query.
pub fn seller_work(m: usize, k: usize) -> f64 {
    subsets_up_to(m, k)
}

pub(crate) fn check_budget(m: usize, k: usize, opts: &ExactOptions) -> Result<()> {
    let est = seller_work(m, k);
    if est > opts.seller_budget as f64 && !opts.override_budget {
        return Err(Error::BudgetExceeded { estimated: est, budget: opts.seller_budget });
    }
    Ok(())
}

/// Per-query view of the seller game: each seller's point ranks, ascending.
#[derive(Debug, Clone)]
pub struct SellerGame {
    /// `ranks[s]` lists the ranks of seller `s`'s points, nearest first.
    pub ranks: Vec<Vec<usize>>,
    /// Nearest rank of every seller, sorted ascending.
    nearest_sorted: Vec<usize>,
}

impl SellerGame {
    pub fn new(rq: &RankedQuery, map: &SellerMap) -> Self {
        let ranks: Vec<Vec<usize>> = (0..map.sellers())
            .map(|s| {
                let mut r: Vec<usize> = map.points_of(s).iter().map(|&p| rq.rank_of[p]).collect();
                r.sort_unstable();
                r
            })
            .collect();
        let mut nearest_sorted: Vec<usize> = ranks.iter().map(|r| r[0]).collect();
        nearest_sorted.sort_unstable();
        Self { ranks, nearest_sorted }
    }

    pub fn sellers(&self) -> usize {
        self.ranks.len()
    }

    fn nearest(&self, s: usize) -> usize {
        self.ranks[s][0]
    }

    /// Sellers whose nearest point ranks strictly after `r`.
    fn count_beyond(&self, r: usize) -> usize {
        self.nearest_sorted.len() - self.nearest_sorted.partition_point(|&x| x <= r)
    }
}

/// `sum_k C(g, k) / C(M-1, h+k)`, or its composite counterpart
/// `sum_k C(g, k) / C(M, h+k+1)`, memoized over `(h, g)`.
struct CoalitionCounts {
    m: usize,
    composite: bool,
    cache: Vec<Option<f64>>,
}

impl CoalitionCounts {
    fn new(m: usize, k: usize, composite: bool) -> Self {
        Self { m, composite, cache: vec![None; (k + 1) * (m + 1)] }
    }

    fn get(&mut self, h: usize, g: usize) -> f64 {
        let slot = h * (self.m + 1) + g;
        if let Some(v) = self.cache[slot] {
            return v;
        }
        let m = self.m;
        let (mut term, ratio): (f64, Box<dyn Fn(usize) -> f64>) = if self.composite {
            (
                1.0 / binom(m, h + 1),
                Box::new(move |j| (g - j) as f64 * (h + j + 2) as f64 / ((j + 1) as f64 * (m - h - j - 1) as f64)),
            )
        } else {
            (
                1.0 / binom(m - 1, h),
                Box::new(move |j| (g - j) as f64 * (h + j + 1) as f64 / ((j + 1) as f64 * (m - 1 - h - j) as f64)),
            )
        };
        let mut sum = term;
        for j in 0..g {
            term *= ratio(j);
            sum += term;
        }
        self.cache[slot] = Some(sum);
        sum
    }
}

/// Merges the sorted rank lists `a` and `b` into `out`, keeping the first `k`.
fn merge_top(a: &[usize], b: &[usize], k: usize, out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while out.len() < k && (i < a.len() || j < b.len()) {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
}

/// Seller values by enumeration; `composite` adds the analyst as a player.
fn seller_values(game: &SellerGame, scorer: &mut Scorer<'_>, rank_owner: &[usize], composite: bool) -> Vec<f64> {
    let m = game.sellers();
    let k = scorer.k();
    let mut s = vec![0.0; m];
    let mut counts = CoalitionCounts::new(m, k, composite);
    let mut pooled: Vec<usize> = Vec::new();
    let mut top: Vec<usize> = Vec::with_capacity(k);
    let mut with_j: Vec<usize> = Vec::with_capacity(k);
    let mut in_coalition = vec![false; m];
    let mut seen = vec![false; m];

    for size in 0..=k.min(m) {
        for_each_combination(m, size, |coalition| {
            pooled.clear();
            for &c in coalition {
                let r = &game.ranks[c];
                pooled.extend_from_slice(&r[..r.len().min(k)]);
            }
            pooled.sort_unstable();
            top.clear();
            top.extend_from_slice(&pooled[..pooled.len().min(k)]);

            // Keep only the minimal coalition: every member must own a point
            // of the top-K set.
            for &c in coalition {
                seen[c] = false;
            }
            for &r in &top {
                seen[rank_owner[r]] = true;
            }
            if !coalition.iter().all(|&c| seen[c]) {
                return;
            }

            let base = scorer.score_sorted(&top);
            let full = top.len() == k;
            let max_rank = top.last().copied().unwrap_or(0);
            let beyond = if full { game.count_beyond(max_rank) } else { 0 };
            for &c in coalition {
                in_coalition[c] = true;
            }
            for j in 0..m {
                if in_coalition[j] {
                    continue;
                }
                let g = if full { beyond - usize::from(game.nearest(j) > max_rank) } else { 0 };
                merge_top(&top, &game.ranks[j], k, &mut with_j);
                let gain = scorer.score_sorted(&with_j) - base;
                if gain != 0.0 {
                    s[j] += counts.get(coalition.len(), g) * gain;
                }
            }
            for &c in coalition {
                in_coalition[c] = false;
            }
        });
    }
    let players = if composite { m + 1 } else { m } as f64;
    s.iter_mut().for_each(|v| *v /= players);
    s
}

/// `K = 1` unweighted seller game: only each seller's nearest point matters,
/// so the point recursion runs on those.
fn nearest_point_values(game: &SellerGame, rq: &RankedQuery, composite: bool) -> Vec<f64> {
    let mut sellers: Vec<usize> = (0..game.sellers()).collect();
    sellers.sort_unstable_by_key(|&s| game.nearest(s));
    let gains: Vec<f64> = sellers.iter().map(|&s| rq.gains[game.nearest(s)]).collect();
    let by_rank = match (rq.task, composite) {
        (Task::Classification, false) => exact::classification_by_rank(&gains, 1),
        (Task::Classification, true) => exact::composite_classification_by_rank(&gains, 1),
        (Task::Regression, false) => exact::regression_by_rank(&gains, rq.target, 1),
        (Task::Regression, true) => exact::composite_regression_by_rank(&gains, rq.target, 1),
    };
    let mut out = vec![0.0; game.sellers()];
    for (r, &s) in sellers.iter().enumerate() {
        out[s] = by_rank[r];
    }
    out
}

fn run(ds: &Dataset, query: Query<'_>, spec: &GameSpec, opts: &ExactOptions, composite: bool) -> Result<(Vec<f64>, f64)> {
    spec.validate(ds)?;
    let map = spec
        .sellers
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("seller valuation needs a seller map".into()))?;
    let rq = RankedQuery::new(ds, query, spec.task)?;
    let game = SellerGame::new(&rq, map);
    let mut scorer = Scorer::new(&rq, &spec.weighting, spec.k);
    let values = if spec.k == 1 && matches!(spec.weighting, Weighting::Unweighted) {
        nearest_point_values(&game, &rq, composite)
    } else {
        check_budget(game.sellers(), spec.k, opts)?;
        let rank_owner: Vec<usize> = rq.neighbors.order.iter().map(|&p| map.owner(p)).collect();
        seller_values(&game, &mut scorer, &rank_owner, composite)
    };
    let all: Vec<usize> = (0..spec.k).collect();
    let analyst = scorer.score_sorted(&all) - values.iter().sum::<f64>();
    Ok((values, analyst))
}

/// Exact per-seller values for one query.
pub fn shapley_per_seller(ds: &Dataset, query: Query<'_>, spec: &GameSpec, opts: &ExactOptions) -> Result<Vec<f64>> {
    Ok(run(ds, query, spec, opts, false)?.0)
}

/// Exact per-seller values and the analyst value for the composite game.
pub fn shapley_per_seller_composite(
    ds: &Dataset,
    query: Query<'_>,
    spec: &GameSpec,
    opts: &ExactOptions,
) -> Result<(Vec<f64>, f64)> {
    run(ds, query, spec, opts, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Labels, Target};

    #[test]
    fn merge_keeps_k_smallest() {
        let mut out = Vec::new();
        merge_top(&[1, 4, 9], &[0, 5], 3, &mut out);
        assert_eq!(out, vec![0, 1, 4]);
        merge_top(&[], &[2], 3, &mut out);
        assert_eq!(out, vec![2]);
    }

    #[test]
    fn single_seller_takes_everything() {
        let ds = Dataset::new(vec![1.0, 2.0, 3.0], 1, Labels::Class(vec![1, 0, 1])).unwrap();
        let spec = GameSpec::classification(2).with_sellers(SellerMap::new(vec![0, 0, 0]).unwrap());
        let q = Query::new(&[0.0], Target::Class(1));
        let v = shapley_per_seller(&ds, q, &spec, &ExactOptions::default()).unwrap();
        assert_eq!(v, vec![0.5]);
        let (v, a) = shapley_per_seller_composite(&ds, q, &spec, &ExactOptions::default()).unwrap();
        assert!((v[0] - 0.25).abs() < 1e-15 && (a - 0.25).abs() < 1e-15);
    }
}
