//! Valuation output and per-query aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Truncated,
    Lsh,
    Mc,
    Weighted,
    Seller,
    Composite,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Truncated => "truncated",
            Method::Lsh => "lsh",
            Method::Mc => "mc",
            Method::Weighted => "weighted",
            Method::Seller => "seller",
            Method::Composite => "composite",
            Method::Oracle => "oracle",
        }
    }
}

/// Nominal `(epsilon, delta)` approximation guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Guarantee {
    pub epsilon: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates_mean: Option<f64>,
    /// Set when a sampling run hit its permutation cap before stopping.
    #[serde(default)]
    pub incomplete: bool,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Per-player values with run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationResult {
    pub values: Vec<f64>,
    pub analyst_value: Option<f64>,
    pub method: Method,
    pub guarantee: Option<Guarantee>,
    pub diagnostics: Diagnostics,
}

impl ValuationResult {
    pub fn new(values: Vec<f64>, method: Method) -> Self {
        Self { values, analyst_value: None, method, guarantee: None, diagnostics: Diagnostics::default() }
    }

    pub fn with_analyst(mut self, value: f64) -> Self {
        self.analyst_value = Some(value);
        self
    }

    pub fn with_guarantee(mut self, epsilon: f64, delta: f64) -> Self {
        self.guarantee = Some(Guarantee { epsilon, delta });
        self
    }
}

/// Column-wise mean of per-query value rows.
pub fn aggregate_over_queries(per_query: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = per_query
        .first()
        .ok_or_else(|| Error::InvalidArgument("no per-query values to aggregate".into()))?;
    let mut out = vec![0.0; first.len()];
    for row in per_query {
        if row.len() != out.len() {
            return Err(Error::DimensionMismatch { expected: out.len(), found: row.len() });
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    let n = per_query.len() as f64;
    out.iter_mut().for_each(|v| *v /= n);
    Ok(out)
}
