//! Game configuration: task, weighting, K, seller ownership, composite flag.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Labels};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

/// Assigns weights to the selected nearest neighbors of a coalition.
///
/// `distances` holds the sorted distances of the `min(K, |S|)` selected
/// neighbors; `out` has the same length and receives their weights.
pub trait WeightRule: Send + Sync + fmt::Debug {
    fn weights(&self, distances: &[f64], k: usize, out: &mut [f64]);

    fn name(&self) -> &'static str;
}

/// Normalized inverse distance. Neighbors at distance zero split the whole
/// weight evenly and everyone else gets nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct InverseDistance;

impl WeightRule for InverseDistance {
    fn weights(&self, distances: &[f64], _k: usize, out: &mut [f64]) {
        let zeros = distances.iter().filter(|&&d| d == 0.0).count();
        if zeros > 0 {
            let share = 1.0 / zeros as f64;
            for (w, &d) in out.iter_mut().zip(distances) {
                *w = if d == 0.0 { share } else { 0.0 };
            }
            return;
        }
        let total: f64 = distances.iter().map(|d| 1.0 / d).sum();
        for (w, &d) in out.iter_mut().zip(distances) {
            *w = (1.0 / d) / total;
        }
    }

    fn name(&self) -> &'static str {
        "inverse-distance"
    }
}

/// Constant `1/K` per neighbor, i.e. the unweighted utility expressed as a
/// weight rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformWeights;

impl WeightRule for UniformWeights {
    fn weights(&self, _distances: &[f64], k: usize, out: &mut [f64]) {
        out.fill(1.0 / k as f64);
    }

    fn name(&self) -> &'static str {
        "uniform"
    }
}

#[derive(Debug, Clone)]
pub enum Weighting {
    Unweighted,
    Weighted(Arc<dyn WeightRule>),
}

impl Weighting {
    pub fn inverse_distance() -> Self {
        Weighting::Weighted(Arc::new(InverseDistance))
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self, Weighting::Weighted(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Weighting::Unweighted => "unweighted",
            Weighting::Weighted(rule) => rule.name(),
        }
    }
}

/// Dense seller ownership: `owner[i]` is the 0-based seller of point `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SellerMap {
    owner: Vec<usize>,
    points: Vec<Vec<usize>>,
}

impl SellerMap {
    /// Every id in `0..max+1` must own at least one point.
    pub fn new(owner: Vec<usize>) -> Result<Self> {
        let m = owner.iter().max().map_or(0, |&s| s + 1);
        let mut points = vec![Vec::new(); m];
        for (i, &s) in owner.iter().enumerate() {
            points[s].push(i);
        }
        if let Some(s) = points.iter().position(Vec::is_empty) {
            return Err(Error::InvalidArgument(format!("seller {s} owns no points")));
        }
        if owner.is_empty() {
            return Err(Error::InvalidArgument("empty seller map".into()));
        }
        Ok(Self { owner, points })
    }

    /// Densifies arbitrary seller labels, numbering them by first
    /// appearance after sorting the distinct labels ascending.
    pub fn from_labels(labels: &[u64]) -> Result<Self> {
        let mut distinct: Vec<u64> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let owner = labels
            .iter()
            .map(|l| distinct.binary_search(l).expect("label present"))
            .collect();
        Self::new(owner)
    }

    /// One seller per point.
    pub fn singletons(n: usize) -> Self {
        Self { owner: (0..n).collect(), points: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn sellers(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, point: usize) -> usize {
        self.owner[point]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn points_of(&self, seller: usize) -> &[usize] {
        &self.points[seller]
    }
}

/// Which game to value.
#[derive(Debug, Clone)]
pub struct GameSpec {
    pub task: Task,
    pub weighting: Weighting,
    pub k: usize,
    /// Adds the analyst as a player without whom every coalition is worth 0.
    pub composite: bool,
    pub sellers: Option<SellerMap>,
}

impl GameSpec {
    pub fn classification(k: usize) -> Self {
        Self { task: Task::Classification, weighting: Weighting::Unweighted, k, composite: false, sellers: None }
    }

    pub fn regression(k: usize) -> Self {
        Self { task: Task::Regression, ..Self::classification(k) }
    }

    pub fn weighted(mut self, rule: Arc<dyn WeightRule>) -> Self {
        self.weighting = Weighting::Weighted(rule);
        self
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn composite(mut self, on: bool) -> Self {
        self.composite = on;
        self
    }

    pub fn with_sellers(mut self, sellers: SellerMap) -> Self {
        self.sellers = Some(sellers);
        self
    }

    /// Number of non-analyst players: sellers if a map is present, else points.
    pub fn players(&self, ds: &Dataset) -> usize {
        self.sellers.as_ref().map_or(ds.len(), SellerMap::sellers)
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if self.k == 0 || self.k > ds.len() {
            return Err(Error::InvalidArgument(format!(
                "K must lie in 1..={}, got {}",
                ds.len(),
                self.k
            )));
        }
        match (self.task, ds.labels()) {
            (Task::Classification, Labels::Real(_)) => {
                return Err(Error::InvalidArgument(
                    "classification needs class labels, found real labels".into(),
                ))
            }
            (Task::Regression, Labels::Class(_)) => {
                return Err(Error::InvalidArgument(
                    "regression needs real labels, found class labels".into(),
                ))
            }
            _ => {}
        }
        if let Some(map) = &self.sellers {
            if map.points() != ds.len() {
                return Err(Error::InvalidArgument(format!(
                    "seller map covers {} points, dataset has {}",
                    map.points(),
                    ds.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_distance_normalizes() {
        let mut w = [0.0; 2];
        InverseDistance.weights(&[1.0, 3.0], 2, &mut w);
        assert!((w[0] - 0.75).abs() < 1e-15 && (w[1] - 0.25).abs() < 1e-15);
        let mut w = [0.0; 3];
        InverseDistance.weights(&[0.0, 0.0, 2.0], 3, &mut w);
        assert_eq!(w, [0.5, 0.5, 0.0]);
    }

    #[test]
    fn seller_map_densifies() {
        let m = SellerMap::from_labels(&[7, 3, 7, 9]).unwrap();
        assert_eq!(m.owners(), &[1, 0, 1, 2]);
        assert_eq!(m.points_of(1), &[0, 2]);
        assert!(SellerMap::new(vec![0, 2]).is_err());
    }
}
