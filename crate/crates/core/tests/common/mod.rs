#![allow(dead_code)]

use knnsv::{Dataset, Labels, Query, SellerMap, Target};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub ds: Dataset,
    pub point: Vec<f64>,
    pub target: Target,
}

impl Instance {
    pub fn query(&self) -> Query<'_> {
        Query::new(&self.point, self.target)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 2-D instance. Coordinates sit on a coarse grid half the time so
/// distance ties occur.
pub fn instance(rng: &mut ChaCha8Rng, n: usize, regression: bool) -> Instance {
    let grid = rng.random_bool(0.5);
    let coord = |rng: &mut ChaCha8Rng| {
        if grid {
            rng.random_range(-3i32..=3) as f64
        } else {
            rng.random_range(-3.0..3.0)
        }
    };
    let features: Vec<f64> = (0..2 * n).map(|_| coord(rng)).collect();
    let point = vec![coord(rng), coord(rng)];
    if regression {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let t = rng.random_range(-2.0..2.0);
        Instance { ds: Dataset::new(features, 2, Labels::Real(y)).unwrap(), point, target: Target::Real(t) }
    } else {
        let y: Vec<u32> = (0..n).map(|_| rng.random_range(0..3)).collect();
        Instance { ds: Dataset::new(features, 2, Labels::Class(y)).unwrap(), point, target: Target::Class(rng.random_range(0..3)) }
    }
}

pub fn sellers(rng: &mut ChaCha8Rng, n: usize, m: usize) -> SellerMap {
    let mut owner: Vec<usize> = (0..n).map(|i| if i < m { i } else { rng.random_range(0..m) }).collect();
    // shuffle so seller ids are not tied to distance order
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        owner.swap(i, j);
    }
    SellerMap::new(owner).unwrap()
}

pub fn assert_close(got: &[f64], want: &[f64], tol: f64, ctx: &str) {
    assert_eq!(got.len(), want.len(), "{ctx}: length");
    for (i, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() <= tol, "{ctx}: player {i}: got {a}, want {b}\n got {got:?}\nwant {want:?}");
    }
}
