//! Permutation-sampling estimator with incremental prefix utilities.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{
    bennett_approx_permutations, bennett_permutations_with, hoeffding_permutations, Tolerance,
};
use super::heap::BoundedMaxHeap;
use crate::data::{Dataset, Labels, QuerySet};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Task, Weighting};
use crate::result::{Method, ValuationResult};
use crate::utility::{RankedQuery, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Hoeffding,
    Bennett,
    BennettApprox,
    Heuristic,
}

/// How prefix utilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evaluation {
    /// Bounded max-heap of the `K` nearest prefix members per query.
    Incremental,
    /// Re-select the `K` nearest of the whole prefix at every step.
    FromScratch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub epsilon: f64,
    pub delta: f64,
    /// Half-width of the marginal-contribution interval. `None` picks a
    /// default from the game.
    pub range: Option<f64>,
    pub bound: Bound,
    pub max_permutations: u64,
    pub seed: u64,
    /// Heuristic stop threshold on the per-step change; defaults to
    /// `epsilon / 50`.
    pub heuristic_threshold: Option<f64>,
    /// Permutations always run before the heuristic may stop.
    pub heuristic_floor: u64,
    pub evaluation: Evaluation,
}

impl McConfig {
    pub fn new(epsilon: f64, delta: f64, bound: Bound, seed: u64) -> Self {
        Self {
            epsilon,
            delta,
            range: None,
            bound,
            max_permutations: 10_000_000,
            seed,
            heuristic_threshold: None,
            heuristic_floor: 100,
            evaluation: Evaluation::Incremental,
        }
    }

    pub fn with_range(mut self, range: f64) -> Self {
        self.range = Some(range);
        self
    }

    pub fn tolerance(&self, ds: &Dataset, queries: &QuerySet, spec: &GameSpec) -> Result<Tolerance> {
        let range = match self.range {
            Some(r) => r,
            None => default_range(ds, queries, spec),
        };
        Tolerance::new(self.epsilon, self.delta, range)
    }
}

/// Default bound on `|marginal contribution|`: `1/K` for unweighted
/// classification, 1 for weighted classification, and for regression the
/// largest squared error any prediction in the label hull (or the empty
/// prediction 0) can make.
pub fn default_range(ds: &Dataset, queries: &QuerySet, spec: &GameSpec) -> f64 {
    match (spec.task, &spec.weighting) {
        (Task::Classification, Weighting::Unweighted) => 1.0 / spec.k as f64,
        (Task::Classification, Weighting::Weighted(_)) => 1.0,
        (Task::Regression, _) => {
            let (lo, hi) = match ds.labels() {
                Labels::Real(y) => y.iter().fold((0.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v))),
                Labels::Class(_) => (0.0, 0.0),
            };
            let r = queries
                .iter()
                .map(|q| {
                    let t = q.target.as_f64();
                    (lo - t).powi(2).max((hi - t).powi(2))
                })
                .fold(0.0, f64::max);
            if r > 0.0 {
                r
            } else {
                1.0
            }
        }
    }
}

/// Prefix state of one permutation against one query.
#[derive(Debug, Clone)]
pub struct PermutationState<'a> {
    scorer: Scorer<'a>,
    heap: BoundedMaxHeap,
    prefix: Vec<usize>,
    buf: Vec<usize>,
    utility: f64,
    evaluation: Evaluation,
}

impl<'a> PermutationState<'a> {
    pub fn new(query: &'a RankedQuery, weighting: &'a Weighting, k: usize, evaluation: Evaluation) -> Self {
        Self {
            scorer: Scorer::new(query, weighting, k),
            heap: BoundedMaxHeap::new(k),
            prefix: Vec::new(),
            buf: Vec::with_capacity(k),
            utility: 0.0,
            evaluation,
        }
    }

    pub fn reset(&mut self) {
        self.heap.clear();
        self.prefix.clear();
        self.utility = 0.0;
    }

    /// Utility of the current prefix.
    pub fn utility(&self) -> f64 {
        self.utility
    }

    /// Adds the points with the given ranks and returns the utility change.
    pub fn insert(&mut self, ranks: impl Iterator<Item = usize>) -> f64 {
        let old = self.utility;
        match self.evaluation {
            Evaluation::Incremental => {
                let mut changed = false;
                for r in ranks {
                    changed |= self.heap.push(r);
                }
                if !changed {
                    return 0.0;
                }
                self.heap.sorted_into(&mut self.buf);
            }
            Evaluation::FromScratch => {
                self.prefix.extend(ranks);
                let k = self.scorer.k();
                self.buf.clear();
                self.buf.extend_from_slice(&self.prefix);
                if self.buf.len() > k {
                    self.buf.select_nth_unstable(k - 1);
                    self.buf.truncate(k);
                }
                self.buf.sort_unstable();
            }
        }
        self.utility = self.scorer.score_sorted(&self.buf);
        self.utility - old
    }
}

/// A game prepared for permutation sampling.
struct Prepared<'a> {
    queries: Vec<RankedQuery>,
    spec: &'a GameSpec,
    /// Points owned by each data player.
    members: Vec<Vec<usize>>,
    composite: bool,
}

impl<'a> Prepared<'a> {
    fn new(ds: &Dataset, queries: &QuerySet, spec: &'a GameSpec) -> Result<Self> {
        spec.validate(ds)?;
        if queries.dim() != ds.dim() {
            return Err(Error::DimensionMismatch { expected: ds.dim(), found: queries.dim() });
        }
        let ranked = (0..queries.len())
            .into_par_iter()
            .map(|j| RankedQuery::new(ds, queries.query(j), spec.task))
            .collect::<Result<Vec<_>>>()?;
        let members = match &spec.sellers {
            Some(map) => (0..map.sellers()).map(|s| map.points_of(s).to_vec()).collect(),
            None => (0..ds.len()).map(|i| vec![i]).collect(),
        };
        Ok(Self { queries: ranked, spec, members, composite: spec.composite })
    }

    fn data_players(&self) -> usize {
        self.members.len()
    }

    fn players(&self) -> usize {
        self.data_players() + usize::from(self.composite)
    }

    fn states(&self, evaluation: Evaluation) -> Vec<PermutationState<'_>> {
        self.queries
            .iter()
            .map(|q| PermutationState::new(q, &self.spec.weighting, self.spec.k, evaluation))
            .collect()
    }

    /// Adds the marginal contributions along `perm` into `phi`.
    fn walk(&self, perm: &[usize], states: &mut [PermutationState<'_>], phi: &mut [f64]) {
        let nq = self.queries.len() as f64;
        let analyst = self.data_players();
        let mut analyst_in = !self.composite;
        for st in states.iter_mut() {
            st.reset();
        }
        for &p in perm {
            if self.composite && p == analyst {
                analyst_in = true;
                phi[p] += states.iter().map(PermutationState::utility).sum::<f64>() / nq;
                continue;
            }
            let pts = &self.members[p];
            let mut total = 0.0;
            for (st, q) in states.iter_mut().zip(&self.queries) {
                total += st.insert(pts.iter().map(|&i| q.rank_of[i]));
            }
            if analyst_in {
                phi[p] += total / nq;
            }
        }
    }
}

fn permutation(players: usize, seed: u64, index: u64, out: &mut Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    out.clear();
    out.extend(0..players);
    out.shuffle(&mut rng);
}

const PERM_CHUNK: u64 = 16;

/// Sum of marginal-contribution vectors over permutations `range`.
fn sum_permutations(game: &Prepared<'_>, seed: u64, evaluation: Evaluation, start: u64, end: u64) -> Vec<f64> {
    let p = game.players();
    let chunks: Vec<u64> = (start..end).step_by(PERM_CHUNK as usize).collect();
    let partial: Vec<Vec<f64>> = chunks
        .par_iter()
        .map(|&c| {
            let mut states = game.states(evaluation);
            let mut acc = vec![0.0; p];
            let mut perm = Vec::with_capacity(p);
            for t in c..(c + PERM_CHUNK).min(end) {
                permutation(p, seed, t, &mut perm);
                game.walk(&perm, &mut states, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; p];
    for part in partial {
        for (a, b) in total.iter_mut().zip(part) {
            *a += b;
        }
    }
    total
}

/// Marginal-contribution vectors of permutations `start..end`, in order.
fn each_permutation(game: &Prepared<'_>, seed: u64, evaluation: Evaluation, start: u64, end: u64) -> Vec<Vec<f64>> {
    let p = game.players();
    (start..end)
        .into_par_iter()
        .map_init(
            || (game.states(evaluation), Vec::with_capacity(p)),
            |(states, perm), t| {
                let mut phi = vec![0.0; p];
                permutation(p, seed, t, perm);
                game.walk(perm, states, &mut phi);
                phi
            },
        )
        .collect()
}

/// Permutation count the configured bound asks for, or `None` for the
/// heuristic.
pub fn required_permutations(
    ds: &Dataset,
    queries: &QuerySet,
    spec: &GameSpec,
    config: &McConfig,
) -> Result<Option<u64>> {
    let tol = config.tolerance(ds, queries, spec)?;
    let data = spec.players(ds);
    let extra = usize::from(spec.composite);
    Ok(match config.bound {
        Bound::Hoeffding => Some(hoeffding_permutations(data + extra, &tol)),
        Bound::Bennett => Some(bennett_permutations_with(data, spec.k, extra, &tol)?),
        Bound::BennettApprox => Some(bennett_approx_permutations(spec.k, &tol)),
        Bound::Heuristic => None,
    })
}

/// Monte Carlo Shapley estimate for any game the spec describes: points,
/// sellers, or either with the analyst.
pub fn estimate_shapley_mc(
    ds: &Dataset,
    queries: &QuerySet,
    spec: &GameSpec,
    config: &McConfig,
) -> Result<ValuationResult> {
    let tol = config.tolerance(ds, queries, spec)?;
    let game = Prepared::new(ds, queries, spec)?;
    if config.max_permutations == 0 {
        return Err(Error::InvalidArgument("max_permutations must be positive".into()));
    }
    let (sum, used, incomplete, guaranteed) = match required_permutations(ds, queries, spec, config)? {
        Some(t) => {
            let used = t.min(config.max_permutations);
            (sum_permutations(&game, config.seed, config.evaluation, 0, used), used, used < t, used == t)
        }
        None => heuristic(&game, config, &tol)?,
    };
    let mut values: Vec<f64> = sum.iter().map(|v| v / used as f64).collect();
    let analyst = game.composite.then(|| values.pop().expect("analyst slot"));
    let mut res = ValuationResult::new(values, Method::Mc);
    res.analyst_value = analyst;
    res.diagnostics.permutations = Some(used);
    res.diagnostics.incomplete = incomplete;
    if incomplete {
        res.diagnostics
            .warnings
            .push(format!("stopped at the permutation cap of {used} before the stopping rule was met"));
    }
    if guaranteed {
        res = res.with_guarantee(tol.epsilon, tol.delta);
    }
    Ok(res)
}

/// Runs until the per-step change of every estimate falls below the
/// threshold (after the floor), the Bennett count is reached, or the cap.
/// Returns `(sum, used, incomplete, guaranteed)`.
fn heuristic(game: &Prepared<'_>, config: &McConfig, tol: &Tolerance) -> Result<(Vec<f64>, u64, bool, bool)> {
    let threshold = config.heuristic_threshold.unwrap_or(config.epsilon / 50.0);
    let extra = usize::from(game.composite);
    let bennett = bennett_permutations_with(game.data_players(), game.spec.k, extra, tol)?;
    let cap = bennett.min(config.max_permutations);
    let p = game.players();
    let mut sum = vec![0.0; p];
    let mut t = 0u64;
    const BATCH: u64 = 64;
    while t < cap {
        let end = (t + BATCH).min(cap);
        for phi in each_permutation(game, config.seed, config.evaluation, t, end) {
            t += 1;
            let mut step = 0.0f64;
            for (s, f) in sum.iter_mut().zip(&phi) {
                let before = if t > 1 { *s / (t - 1) as f64 } else { 0.0 };
                *s += f;
                step = step.max((*s / t as f64 - before).abs());
            }
            if t >= config.heuristic_floor && step < threshold {
                return Ok((sum, t, false, false));
            }
        }
    }
    let hit_bound = cap == bennett;
    Ok((sum, t, !hit_bound, hit_bound))
}

/// Averages marginal contributions over all `n!` orders (at most 8
/// players) with the same incremental machinery.
pub fn enumerate_shapley_mc(ds: &Dataset, queries: &QuerySet, spec: &GameSpec) -> Result<ValuationResult> {
    let game = Prepared::new(ds, queries, spec)?;
    let p = game.players();
    if p > crate::oracle::PERMUTATION_CAP {
        return Err(Error::TooManyPlayers { players: p, cap: crate::oracle::PERMUTATION_CAP });
    }
    let mut perm: Vec<usize> = (0..p).collect();
    let mut states = game.states(Evaluation::Incremental);
    let mut sum = vec![0.0; p];
    let mut count = 0u64;
    loop {
        game.walk(&perm, &mut states, &mut sum);
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut values: Vec<f64> = sum.iter().map(|v| v / count as f64).collect();
    let analyst = game.composite.then(|| values.pop().expect("analyst slot"));
    let mut res = ValuationResult::new(values, Method::Mc);
    res.analyst_value = analyst;
    res.diagnostics.permutations = Some(count);
    Ok(res)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
