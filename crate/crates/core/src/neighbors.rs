//! Distance ranking of the training set against one query.

use crate::data::Dataset;
use crate::error::{Error, Result};

mod sealed {
    pub trait Sealed {}
}

/// Distance function between feature vectors. Sealed: only [`Euclidean`]
/// ships.
pub trait Metric: sealed::Sealed + Send + Sync {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64;
}

/// The l2 metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct Euclidean;

impl sealed::Sealed for Euclidean {}

impl Metric for Euclidean {
    #[inline]
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        squared_l2(a, b).sqrt()
    }
}

#[inline]
pub fn squared_l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    Euclidean.distance(a, b)
}

/// Training points sorted by distance to a query.
///
/// `order[r]` is the point at rank `r` (0-based) and `distances[r]` its
/// distance. Ties are broken by ascending point index.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedNeighbors {
    pub order: Vec<usize>,
    pub distances: Vec<f64>,
}

impl RankedNeighbors {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Inverse permutation: `ranks()[i]` is the 0-based rank of point `i`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (r, &i) in self.order.iter().enumerate() {
            rank[i] = r;
        }
        rank
    }
}

pub(crate) fn check_dim(ds: &Dataset, point: &[f64]) -> Result<()> {
    if point.len() != ds.dim() {
        return Err(Error::DimensionMismatch { expected: ds.dim(), found: point.len() });
    }
    Ok(())
}

/// Sorts all training points by Euclidean distance to `query`.
pub fn rank_by_distance(ds: &Dataset, query: &[f64]) -> Result<RankedNeighbors> {
    check_dim(ds, query)?;
    let dist: Vec<f64> = (0..ds.len()).map(|i| l2(ds.row(i), query)).collect();
    Ok(rank_distances(dist))
}

/// Ranks precomputed distances (index = point id).
pub(crate) fn rank_distances(dist: Vec<f64>) -> RankedNeighbors {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_unstable_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    let distances = order.iter().map(|&i| dist[i]).collect();
    RankedNeighbors { order, distances }
}
