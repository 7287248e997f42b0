mod common;

use common::{assert_close, instance, rng, sellers};
use knnsv::exact::{self, ExactOptions};
use knnsv::montecarlo::{
    bennett_approx_permutations, bennett_permutations, enumerate_shapley_mc, estimate_shapley_mc,
    hoeffding_permutations, Bound, Evaluation, McConfig, PermutationState, Tolerance,
};
use knnsv::oracle::KnnGame;
use knnsv::utility::RankedQuery;
use knnsv::{utility, Dataset, GameSpec, Labels, QuerySet, Weighting};
use rand::seq::SliceRandom;
use rand::Rng;

fn single_query(inst: &common::Instance) -> QuerySet {
    let labels = match inst.target {
        knnsv::Target::Class(c) => Labels::Class(vec![c]),
        knnsv::Target::Real(y) => Labels::Real(vec![y]),
    };
    QuerySet::new(inst.point.clone(), inst.point.len(), labels).unwrap()
}

#[test]
fn full_enumeration_matches_oracle() {
    let mut r = rng(31);
    for case in 0..40 {
        let n = r.random_range(1..=6);
        let k = r.random_range(1..=3usize).min(n);
        let regression = case % 2 == 0;
        let inst = instance(&mut r, n, regression);
        let mut spec = if regression { GameSpec::regression(k) } else { GameSpec::classification(k) };
        if case % 3 == 0 {
            spec = spec.with_weighting(Weighting::inverse_distance());
        }
        if case % 4 == 1 {
            let m = r.random_range(1..=n);
            spec = spec.with_sellers(sellers(&mut r, n, m));
        }
        if case % 5 == 2 {
            spec = spec.composite(true);
        }
        let want = KnnGame::new(&inst.ds, inst.query(), &spec).unwrap().subsets().unwrap();
        let got = enumerate_shapley_mc(&inst.ds, &single_query(&inst), &spec).unwrap();
        let mut all = got.values.clone();
        all.extend(got.analyst_value);
        assert_close(&all, &want, 1e-12, &format!("case {case}"));
    }
}

#[test]
fn incremental_prefix_utility_matches_recomputation() {
    let mut r = rng(32);
    for case in 0..30 {
        let n = r.random_range(1..=40);
        let k = r.random_range(1..=5usize).min(n);
        let regression = case % 2 == 0;
        let inst = instance(&mut r, n, regression);
        let mut spec = if regression { GameSpec::regression(k) } else { GameSpec::classification(k) };
        if case % 3 == 0 {
            spec = spec.with_weighting(Weighting::inverse_distance());
        }
        let rq = RankedQuery::new(&inst.ds, inst.query(), spec.task).unwrap();
        let mut inc = PermutationState::new(&rq, &spec.weighting, k, Evaluation::Incremental);
        let mut scratch = PermutationState::new(&rq, &spec.weighting, k, Evaluation::FromScratch);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        for (t, &p) in perm.iter().enumerate() {
            let a = inc.insert(std::iter::once(rq.rank_of[p]));
            let b = scratch.insert(std::iter::once(rq.rank_of[p]));
            assert!((a - b).abs() < 1e-12);
            let direct = utility(&inst.ds, &perm[..=t], inst.query(), &spec).unwrap();
            assert!((inc.utility() - direct).abs() < 1e-12, "case {case} prefix {t}");
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let mut r = rng(33);
    let inst = instance(&mut r, 40, false);
    let qs = single_query(&inst);
    let spec = GameSpec::classification(2);
    let cfg = McConfig::new(0.1, 0.1, Bound::BennettApprox, 9);
    let a = estimate_shapley_mc(&inst.ds, &qs, &spec, &cfg).unwrap();
    let b = estimate_shapley_mc(&inst.ds, &qs, &spec, &cfg).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| estimate_shapley_mc(&inst.ds, &qs, &spec, &cfg).unwrap());
    assert_eq!(a.values, c.values);
    let other = McConfig::new(0.1, 0.1, Bound::BennettApprox, 10);
    assert_ne!(a.values, estimate_shapley_mc(&inst.ds, &qs, &spec, &other).unwrap().values);
}

#[test]
fn bound_ordering_and_independence_from_n() {
    let tol = Tolerance::new(0.1, 0.1, 1.0).unwrap();
    let mut bennett = Vec::new();
    for n in [1_000, 10_000, 100_000] {
        for k in [1, 5, 10] {
            let b = bennett_permutations(n, k, &tol).unwrap();
            let h = hoeffding_permutations(n, &tol);
            assert!(b < h, "n={n} k={k}: bennett {b} hoeffding {h}");
            if k == 1 {
                bennett.push(b);
            }
        }
    }
    assert!(bennett.windows(2).all(|w| w[0] == w[1]), "{bennett:?}");
    let approx = bennett_approx_permutations(1, &tol);
    assert!(approx > 0);
}

#[test]
fn bennett_guarantee_small() {
    // 20 seeded trials at N = 100; the acceptance suite runs the full 50.
    let mut r = rng(34);
    let mut pass = 0;
    let trials = 20;
    for t in 0..trials {
        let inst = instance(&mut r, 100, false);
        let qs = single_query(&inst);
        let spec = GameSpec::classification(1);
        let exact = exact::shapley_exact(&inst.ds, inst.query(), &spec, &ExactOptions::default()).unwrap();
        let est = estimate_shapley_mc(&inst.ds, &qs, &spec, &McConfig::new(0.1, 0.1, Bound::Bennett, t)).unwrap();
        assert!(est.guarantee.is_some());
        let err = est.values.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pass += usize::from(err <= 0.1);
    }
    assert!(pass as f64 >= 0.9 * trials as f64, "{pass}/{trials}");
}

#[test]
fn heuristic_stops_no_later_and_stays_accurate() {
    let mut r = rng(35);
    for t in 0..10 {
        let inst = instance(&mut r, 100, false);
        let qs = single_query(&inst);
        let spec = GameSpec::classification(1);
        let exact = exact::shapley_exact(&inst.ds, inst.query(), &spec, &ExactOptions::default()).unwrap();
        let bound = estimate_shapley_mc(&inst.ds, &qs, &spec, &McConfig::new(0.1, 0.1, Bound::Bennett, t)).unwrap();
        let heur = estimate_shapley_mc(&inst.ds, &qs, &spec, &McConfig::new(0.1, 0.1, Bound::Heuristic, t)).unwrap();
        assert!(heur.diagnostics.permutations <= bound.diagnostics.permutations);
        assert!(!heur.diagnostics.incomplete);
        let err = heur.values.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 0.1, "trial {t}: {err}");
    }
}

#[test]
fn permutation_cap_flags_incomplete() {
    let ds = Dataset::new((0..20).map(f64::from).collect(), 1, Labels::Class(vec![1; 20])).unwrap();
    let qs = QuerySet::new(vec![0.5], 1, Labels::Class(vec![1])).unwrap();
    let mut cfg = McConfig::new(0.1, 0.1, Bound::Heuristic, 1);
    cfg.max_permutations = 5;
    cfg.heuristic_floor = 100;
    let res = estimate_shapley_mc(&ds, &qs, &GameSpec::classification(1), &cfg).unwrap();
    assert!(res.diagnostics.incomplete);
    assert_eq!(res.diagnostics.permutations, Some(5));
}

#[test]
fn default_range_for_unweighted_classification() {
    let mut r = rng(36);
    let inst = instance(&mut r, 10, false);
    let qs = single_query(&inst);
    for k in 1..=4 {
        let tol = McConfig::new(0.1, 0.1, Bound::Bennett, 0).tolerance(&inst.ds, &qs, &GameSpec::classification(k)).unwrap();
        assert_eq!(tol.range, 1.0 / k as f64);
    }
}
