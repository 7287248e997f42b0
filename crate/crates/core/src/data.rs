//! Feature matrices and labels.

use crate::error::{Error, Result};

/// Per-point labels: class ids for classification, reals for regression.
#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Class(Vec<u32>),
    Real(Vec<f64>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Class(v) => v.len(),
            Labels::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> Target {
        match self {
            Labels::Class(v) => Target::Class(v[i]),
            Labels::Real(v) => Target::Real(v[i]),
        }
    }

    fn select(&self, idx: &[usize]) -> Labels {
        match self {
            Labels::Class(v) => Labels::Class(idx.iter().map(|&i| v[i]).collect()),
            Labels::Real(v) => Labels::Real(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

/// A single label value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Class(u32),
    Real(f64),
}

impl Target {
    /// The label as a real number (class ids are widened).
    pub fn as_f64(self) -> f64 {
        match self {
            Target::Class(c) => c as f64,
            Target::Real(y) => y,
        }
    }
}

/// `N x d` row-major feature matrix with one label per row. These are the
/// players of the data-only game.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Labels,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from a flat row-major buffer.
    ///
    /// Rejects empty data, ragged buffers, label-count mismatches and
    /// non-finite values.
    pub fn new(features: Vec<f64>, d: usize, labels: Labels) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidData("feature dimension must be at least 1".into()));
        }
        if features.len() % d != 0 {
            return Err(Error::InvalidData(format!(
                "feature buffer of length {} is not a multiple of d = {d}",
                features.len()
            )));
        }
        let n = features.len() / d;
        if n == 0 {
            return Err(Error::InvalidData("dataset must contain at least one point".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidData(format!(
                "{} labels for {n} points",
                labels.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature in row {}",
                pos / d
            )));
        }
        if let Labels::Real(y) = &labels {
            if let Some(row) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("non-finite label in row {row}")));
            }
        }
        Ok(Self { features, labels, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Labels) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidData(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            flat.extend_from_slice(row);
        }
        Self::new(flat, d, labels)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Target {
        self.labels.get(i)
    }

    /// Copies the listed rows (in the given order) into a new dataset.
    pub fn select(&self, idx: &[usize]) -> Result<Dataset> {
        let mut flat = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            if i >= self.n {
                return Err(Error::InvalidArgument(format!("row {i} out of range")));
            }
            flat.extend_from_slice(self.row(i));
        }
        Dataset::new(flat, self.d, self.labels.select(idx))
    }

    /// Views row `i` as a query (point plus label).
    pub fn as_query(&self, i: usize) -> Query<'_> {
        Query { point: self.row(i), target: self.label(i) }
    }
}

/// A test point together with its label.
#[derive(Debug, Clone, Copy)]
pub struct Query<'a> {
    pub point: &'a [f64],
    pub target: Target,
}

impl<'a> Query<'a> {
    pub fn new(point: &'a [f64], target: Target) -> Self {
        Self { point, target }
    }
}

/// The test set: `N_test x d` features and their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    inner: Dataset,
}

impl QuerySet {
    pub fn new(features: Vec<f64>, d: usize, labels: Labels) -> Result<Self> {
        Ok(Self { inner: Dataset::new(features, d, labels)? })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Labels) -> Result<Self> {
        Ok(Self { inner: Dataset::from_rows(rows, labels)? })
    }

    pub fn from_dataset(inner: Dataset) -> Self {
        Self { inner }
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn query(&self, j: usize) -> Query<'_> {
        self.inner.as_query(j)
    }

    pub fn iter(&self) -> impl Iterator<Item = Query<'_>> + '_ {
        (0..self.len()).map(move |j| self.query(j))
    }

    pub fn as_dataset(&self) -> &Dataset {
        &self.inner
    }

    /// Sub-selection of queries, e.g. to split a test set in two.
    pub fn select(&self, idx: &[usize]) -> Result<QuerySet> {
        Ok(Self { inner: self.inner.select(idx)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_non_finite() {
        assert!(Dataset::from_rows(&[vec![1.0, 2.0], vec![1.0]], Labels::Class(vec![0, 1])).is_err());
        assert!(Dataset::new(vec![1.0, f64::NAN], 1, Labels::Class(vec![0, 0])).is_err());
        assert!(Dataset::new(vec![1.0, 2.0], 1, Labels::Real(vec![0.0, f64::INFINITY])).is_err());
        assert!(Dataset::new(vec![], 1, Labels::Class(vec![])).is_err());
        assert!(Dataset::new(vec![1.0, 2.0], 1, Labels::Class(vec![0])).is_err());
    }

    #[test]
    fn select_keeps_rows_and_labels() {
        let ds = Dataset::from_rows(
            &[vec![0.0], vec![1.0], vec![2.0]],
            Labels::Real(vec![10.0, 11.0, 12.0]),
        )
        .unwrap();
        let sub = ds.select(&[2, 0]).unwrap();
        assert_eq!(sub.row(0), &[2.0]);
        assert_eq!(sub.label(1), Target::Real(10.0));
    }
}
