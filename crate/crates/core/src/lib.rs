//! Shapley-value data valuation for K-nearest-neighbor utilities.
//!
//! The crate values training points (or the sellers who own them, and the
//! analyst who runs the model) under the KNN utility families:
//!
//! * [`exact`]: closed-form recursions for unweighted classification and
//!   regression, the ε-truncated recursion, the `O(N^K)` weighted algorithm,
//!   and the composite (data + analyst) games.
//! * [`sellers`]: exact values when one seller owns several points.
//! * [`lsh`]: p-stable LSH retrieval and the sublinear (ε, δ) approximation.
//! * [`montecarlo`]: permutation sampling with Hoeffding or Bennett sample
//!   sizes, using a bounded max-heap to update prefix utilities.
//! * [`oracle`]: brute-force enumeration used as ground truth.
//!
//! Everything is computed in `f64`. Datasets are immutable after
//! construction and are shared read-only across worker threads.

pub mod data;
pub mod error;
pub mod exact;
pub mod game;
pub mod lsh;
pub mod montecarlo;
pub mod neighbors;
pub mod oracle;
pub mod result;
pub mod sellers;
pub mod utility;

mod combin;
mod parallel;

pub use data::{Dataset, Labels, Query, QuerySet, Target};
pub use error::{Error, Result};
pub use game::{GameSpec, InverseDistance, SellerMap, Task, UniformWeights, WeightRule, Weighting};
pub use neighbors::{rank_by_distance, RankedNeighbors};
pub use result::{aggregate_over_queries, Diagnostics, Guarantee, Method, ValuationResult};
pub use utility::{composite_utility, utility, Coalition};
