//! Fixtures for the criterion benches.

use knnsv::{Dataset, QuerySet};
use knnsv_cli::synth::{generate, SynthConfig};

/// Two-class Gaussian mixture with `n` training points and `n_test` queries.
pub fn mixture(n: usize, d: usize, n_test: usize, seed: u64) -> (Dataset, QuerySet) {
    let cfg = SynthConfig::classification(n, d, 2, seed).with_clusters(10).with_separation(3.0).with_test(n_test);
    let (ds, qs) = generate(&cfg).expect("valid fixture config");
    (ds, qs.expect("fixture has queries"))
}
