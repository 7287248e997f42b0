//! Brute-force Shapley values for small games.
//!
//! The utility is a callback over coalitions given as sorted player lists,
//! so the same routines serve point, seller and composite games.

use crate::combin::binom;
use crate::data::{Dataset, Query};
use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::utility::{member_points, RankedQuery, Scorer};

pub const SUBSET_CAP: usize = 20;
pub const PERMUTATION_CAP: usize = 8;
pub const LEMMA_CAP: usize = 12;

fn too_many(players: usize, cap: usize) -> Result<()> {
    if players > cap {
        return Err(Error::TooManyPlayers { players, cap });
    }
    Ok(())
}

fn members(mask: u32, players: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..players).filter(|&p| mask >> p & 1 == 1));
}

/// Shapley values by enumerating every coalition and weighting marginal
/// contributions by `|S|! (n - |S| - 1)! / n!`.
pub fn shapley_bruteforce_subsets<F>(players: usize, utility: F) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> f64,
{
    too_many(players, SUBSET_CAP)?;
    if players == 0 {
        return Ok(Vec::new());
    }
    let full = 1u32 << players;
    let mut buf = Vec::with_capacity(players);
    let value: Vec<f64> = (0..full)
        .map(|mask| {
            members(mask, players, &mut buf);
            utility(&buf)
        })
        .collect();
    let n = players as f64;
    let weight: Vec<f64> = (0..players).map(|s| 1.0 / (n * binom(players - 1, s))).collect();
    let mut out = vec![0.0; players];
    for mask in 0..full {
        let size = mask.count_ones() as usize;
        for (p, o) in out.iter_mut().enumerate() {
            if mask >> p & 1 == 0 {
                *o += weight[size] * (value[(mask | 1 << p) as usize] - value[mask as usize]);
            }
        }
    }
    Ok(out)
}

/// Shapley values as the average marginal contribution over all `n!`
/// join orders.
pub fn shapley_bruteforce_permutations<F>(players: usize, utility: F) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> f64,
{
    too_many(players, PERMUTATION_CAP)?;
    if players == 0 {
        return Ok(Vec::new());
    }
    let mut perm: Vec<usize> = (0..players).collect();
    let mut out = vec![0.0; players];
    let mut count = 0u64;
    let mut prefix = Vec::with_capacity(players);
    loop {
        prefix.clear();
        let mut prev = utility(&prefix);
        for &p in &perm {
            let pos = prefix.partition_point(|&x| x < p);
            prefix.insert(pos, p);
            let cur = utility(&prefix);
            out[p] += cur - prev;
            prev = cur;
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out.iter_mut().for_each(|v| *v /= count as f64);
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Residual between `s_i - s_j` and the coalition-difference identity
/// `1/(n-1) sum_S [v(S+i) - v(S+j)] / C(n-2, |S|)` over `S` avoiding both.
pub fn check_difference_lemma<F>(players: usize, utility: F, i: usize, j: usize) -> Result<f64>
where
    F: Fn(&[usize]) -> f64,
{
    too_many(players, LEMMA_CAP)?;
    if i >= players || j >= players || i == j || players < 2 {
        return Err(Error::InvalidArgument("need two distinct players in range".into()));
    }
    let s = shapley_bruteforce_subsets(players, &utility)?;
    Ok((s[i] - s[j] - difference_sum(players, &utility, i, j)).abs())
}

/// Right-hand side of the difference identity.
pub fn difference_sum<F>(players: usize, utility: F, i: usize, j: usize) -> f64
where
    F: Fn(&[usize]) -> f64,
{
    let n = players;
    let mut buf = Vec::with_capacity(n);
    let mut rhs = 0.0;
    for mask in 0u32..(1 << n) {
        if mask >> i & 1 == 1 || mask >> j & 1 == 1 {
            continue;
        }
        let size = mask.count_ones() as usize;
        members(mask | 1 << i, n, &mut buf);
        let a = utility(&buf);
        members(mask | 1 << j, n, &mut buf);
        let b = utility(&buf);
        rhs += (a - b) / binom(n - 2, size);
    }
    rhs / (n - 1) as f64
}

/// A game over one query that oracles can call repeatedly.
///
/// Players are points, or sellers when the spec carries a seller map. In
/// the composite game the analyst is the extra last player.
#[derive(Debug, Clone)]
pub struct KnnGame<'a> {
    spec: &'a GameSpec,
    rq: RankedQuery,
    players: usize,
}

impl<'a> KnnGame<'a> {
    pub fn new(ds: &Dataset, query: Query<'_>, spec: &'a GameSpec) -> Result<Self> {
        spec.validate(ds)?;
        let rq = RankedQuery::new(ds, query, spec.task)?;
        let players = spec.players(ds) + usize::from(spec.composite);
        Ok(Self { spec, rq, players })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    /// Utility of a coalition of players.
    pub fn value(&self, coalition: &[usize]) -> f64 {
        let mut members = coalition;
        if self.spec.composite {
            let analyst = self.players - 1;
            if !coalition.contains(&analyst) || coalition.len() == 1 {
                return 0.0;
            }
            members = &coalition[..coalition.len() - 1];
            debug_assert!(members.iter().all(|&p| p != analyst), "analyst must be last");
        }
        let points = member_points(self.spec, members).expect("valid members");
        let mut ranks: Vec<usize> = points.iter().map(|&p| self.rq.rank_of[p]).collect();
        Scorer::new(&self.rq, &self.spec.weighting, self.spec.k).score_ranks(&mut ranks)
    }

    pub fn subsets(&self) -> Result<Vec<f64>> {
        shapley_bruteforce_subsets(self.players, |c| self.value(c))
    }

    pub fn permutations(&self) -> Result<Vec<f64>> {
        shapley_bruteforce_permutations(self.players, |c| self.value(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn additive(c: &[usize]) -> f64 {
        c.iter().map(|&p| (p + 1) as f64).sum()
    }

    #[test]
    fn single_and_symmetric() {
        assert_eq!(shapley_bruteforce_subsets(1, |c| if c.is_empty() { 0.0 } else { 2.5 }).unwrap(), vec![2.5]);
        let sym = |c: &[usize]| if c.len() == 2 { 1.0 } else { 0.0 };
        assert_eq!(shapley_bruteforce_subsets(2, sym).unwrap(), vec![0.5, 0.5]);
        assert_eq!(shapley_bruteforce_permutations(2, sym).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn additive_game() {
        let s = shapley_bruteforce_subsets(4, additive).unwrap();
        assert_eq!(s, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn caps() {
        assert!(shapley_bruteforce_subsets(21, additive).is_err());
        assert!(shapley_bruteforce_permutations(9, additive).is_err());
        assert!(check_difference_lemma(13, additive, 0, 1).is_err());
    }
}
