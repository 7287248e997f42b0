//! Locality-sensitive hashing for approximate nearest neighbors and the
//! sublinear Shapley approximation built on it.
//!
//! Retrieval uses `l` tables of `m` concatenated Gaussian projections
//! `floor((w.x + b) / r)`. Parameters follow from the relative contrast of
//! the data at rank `K*`.

pub mod collision;
pub mod contrast;
pub mod index;
pub mod params;
mod valuation;

pub use collision::{collision_probability, g_exponent};
pub use contrast::{estimate_contrast, ContrastEstimate, DEFAULT_NORMALIZED_WIDTH};
pub use index::{LshIndex, Retrieval};
pub use params::{select_params, LshParams, ParamRequest, Selection};
pub use valuation::{shapley_lsh, value};
