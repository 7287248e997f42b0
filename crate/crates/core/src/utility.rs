//! KNN utility functions for every game variant.
//!
//! All variants share one shape: the prediction is a weighted sum over the
//! `min(K, |S|)` nearest members of `S`, where each neighbor contributes a
//! gain (the match indicator for classification, its label for regression).
//! Classification scores the prediction directly; regression scores
//! `-(prediction - y_test)^2`. The empty coalition is worth 0 in every case.

use crate::data::{Dataset, Query, Target};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Task, Weighting};
use crate::neighbors::{rank_by_distance, RankedNeighbors};

/// A coalition of the composite game: sellers (or points, without a seller
/// map) plus possibly the analyst.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coalition {
    pub members: Vec<usize>,
    pub analyst: bool,
}

/// One query with the training set ranked against it and per-rank gains.
#[derive(Debug, Clone)]
pub struct RankedQuery {
    pub neighbors: RankedNeighbors,
    /// `rank_of[i]` is the 0-based rank of point `i`.
    pub rank_of: Vec<usize>,
    /// Gain of the point at each rank.
    pub gains: Vec<f64>,
    /// Regression target; 0 for classification.
    pub target: f64,
    pub task: Task,
}

impl RankedQuery {
    pub fn new(ds: &Dataset, query: Query<'_>, task: Task) -> Result<Self> {
        let neighbors = rank_by_distance(ds, query.point)?;
        Self::from_neighbors(ds, neighbors, query.target, task)
    }

    pub fn from_neighbors(
        ds: &Dataset,
        neighbors: RankedNeighbors,
        target: Target,
        task: Task,
    ) -> Result<Self> {
        let gains = neighbors.order.iter().map(|&i| gain(ds.label(i), target, task)).collect::<Result<_>>()?;
        let target = match task {
            Task::Classification => 0.0,
            Task::Regression => target.as_f64(),
        };
        Ok(Self { rank_of: neighbors.ranks(), neighbors, gains, target, task })
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

fn gain(label: Target, target: Target, task: Task) -> Result<f64> {
    match (task, label, target) {
        (Task::Classification, Target::Class(a), Target::Class(b)) => Ok(if a == b { 1.0 } else { 0.0 }),
        (Task::Regression, Target::Real(y), Target::Real(_)) => Ok(y),
        _ => Err(Error::InvalidArgument(format!(
            "label kind does not fit a {task:?} query"
        ))),
    }
}

/// Scores coalitions given as ascending rank lists. Holds scratch buffers so
/// hot loops do not allocate.
#[derive(Debug, Clone)]
pub struct Scorer<'a> {
    query: &'a RankedQuery,
    weighting: &'a Weighting,
    k: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
}

impl<'a> Scorer<'a> {
    pub fn new(query: &'a RankedQuery, weighting: &'a Weighting, k: usize) -> Self {
        Self { query, weighting, k, dist: Vec::with_capacity(k), weights: vec![0.0; k] }
    }

    pub fn query(&self) -> &'a RankedQuery {
        self.query
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Utility of a coalition whose members have the given ranks, sorted
    /// ascending. Only the first `K` entries are read.
    pub fn score_sorted(&mut self, ranks: &[usize]) -> f64 {
        let top = &ranks[..ranks.len().min(self.k)];
        if top.is_empty() {
            return 0.0;
        }
        let pred = match self.weighting {
            Weighting::Unweighted => {
                top.iter().map(|&r| self.query.gains[r]).sum::<f64>() / self.k as f64
            }
            Weighting::Weighted(rule) => {
                self.dist.clear();
                self.dist.extend(top.iter().map(|&r| self.query.neighbors.distances[r]));
                let w = &mut self.weights[..top.len()];
                rule.weights(&self.dist, self.k, w);
                top.iter().zip(w.iter()).map(|(&r, &w)| w * self.query.gains[r]).sum()
            }
        };
        self.finish(pred)
    }

    /// Like [`score_sorted`](Self::score_sorted) for an unsorted rank list.
    pub fn score_ranks(&mut self, ranks: &mut [usize]) -> f64 {
        ranks.sort_unstable();
        self.score_sorted(ranks)
    }

    fn finish(&self, pred: f64) -> f64 {
        match self.query.task {
            Task::Classification => pred,
            Task::Regression => {
                let e = pred - self.query.target;
                -e * e
            }
        }
    }
}

/// Utility of the training subset `subset` (point indices) for one query.
pub fn utility(ds: &Dataset, subset: &[usize], query: Query<'_>, spec: &GameSpec) -> Result<f64> {
    spec.validate(ds)?;
    let rq = RankedQuery::new(ds, query, spec.task)?;
    let mut ranks = subset_ranks(&rq, subset)?;
    Ok(Scorer::new(&rq, &spec.weighting, spec.k).score_ranks(&mut ranks))
}

/// Utility of a composite-game coalition: 0 unless the analyst is present
/// together with at least one data owner, otherwise the utility of all
/// data held by the member sellers (or the member points when the spec has
/// no seller map).
pub fn composite_utility(
    ds: &Dataset,
    coalition: &Coalition,
    query: Query<'_>,
    spec: &GameSpec,
) -> Result<f64> {
    if !coalition.analyst || coalition.members.is_empty() {
        return Ok(0.0);
    }
    let points = member_points(spec, &coalition.members)?;
    utility(ds, &points, query, spec)
}

pub(crate) fn member_points(spec: &GameSpec, members: &[usize]) -> Result<Vec<usize>> {
    match &spec.sellers {
        None => Ok(members.to_vec()),
        Some(map) => {
            let mut pts = Vec::new();
            for &s in members {
                if s >= map.sellers() {
                    return Err(Error::InvalidArgument(format!("seller {s} out of range")));
                }
                pts.extend_from_slice(map.points_of(s));
            }
            Ok(pts)
        }
    }
}

fn subset_ranks(rq: &RankedQuery, subset: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; rq.len()];
    let mut ranks = Vec::with_capacity(subset.len());
    for &i in subset {
        if i >= rq.len() {
            return Err(Error::InvalidArgument(format!("point {i} out of range")));
        }
        if !std::mem::replace(&mut seen[i], true) {
            ranks.push(rq.rank_of[i]);
        }
    }
    Ok(ranks)
}
