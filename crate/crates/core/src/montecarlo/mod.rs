//! Permutation-sampling Shapley estimates.
//!
//! Sample sizes come from Hoeffding's inequality (baseline), Bennett's
//! inequality, its `N`-free approximation, or a heuristic stop on the
//! per-step change of the estimates.

pub mod bounds;
pub mod heap;
mod estimator;

pub use bounds::{
    bennett_approx_permutations, bennett_h, bennett_lhs, bennett_permutations, bennett_q, hoeffding_count,
    hoeffding_permutations, Tolerance,
};
pub use estimator::{
    default_range, enumerate_shapley_mc, estimate_shapley_mc, required_permutations, Bound, Evaluation,
    McConfig, PermutationState,
};
