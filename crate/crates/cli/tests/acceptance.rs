//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured quantity and its pinned tolerance, then exits nonzero if any
//! criterion failed.

use std::io::Write;
use std::time::{Duration, Instant};

use knnsv::exact::{self, ExactOptions, TruncationConfig};
use knnsv::lsh::{collision_probability, g_exponent, select_params, shapley_lsh, LshIndex, ParamRequest};
use knnsv::montecarlo::{bennett_permutations, estimate_shapley_mc, hoeffding_permutations, Bound, McConfig, Tolerance};
use knnsv::oracle::{shapley_bruteforce_subsets, KnnGame};
use knnsv::sellers::{shapley_per_seller, shapley_per_seller_composite};
use knnsv::{
    composite_utility, rank_by_distance, utility, Coalition, Dataset, GameSpec, Labels, Query, QuerySet, SellerMap,
    Target, Weighting,
};
use knnsv_cli::bench::{self, BenchConfig};
use knnsv_cli::synth::{generate, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Instance {
    ds: Dataset,
    point: Vec<f64>,
    target: Target,
}

impl Instance {
    fn query(&self) -> Query<'_> {
        Query::new(&self.point, self.target)
    }
}

/// Random 2-D instance; half the time on an integer grid so distances tie.
fn instance(r: &mut ChaCha8Rng, n: usize, regression: bool) -> Instance {
    let grid = r.random_bool(0.5);
    let coord = |r: &mut ChaCha8Rng| if grid { r.random_range(-3i32..=3) as f64 } else { r.random_range(-3.0..3.0) };
    let features: Vec<f64> = (0..2 * n).map(|_| coord(r)).collect();
    let point = vec![coord(r), coord(r)];
    if regression {
        let y = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let t = r.random_range(-2.0..2.0);
        Instance { ds: Dataset::new(features, 2, Labels::Real(y)).unwrap(), point, target: Target::Real(t) }
    } else {
        let y = (0..n).map(|_| r.random_range(0..3)).collect();
        let t = r.random_range(0..3);
        Instance { ds: Dataset::new(features, 2, Labels::Class(y)).unwrap(), point, target: Target::Class(t) }
    }
}

fn seller_map(r: &mut ChaCha8Rng, n: usize, m: usize) -> SellerMap {
    let mut owner: Vec<usize> = (0..n).map(|i| if i < m { i } else { r.random_range(0..m) }).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        owner.swap(i, j);
    }
    SellerMap::new(owner).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn spec_for(regression: bool, k: usize) -> GameSpec {
    if regression {
        GameSpec::regression(k)
    } else {
        GameSpec::classification(k)
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("runtime {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()))
}

// 1. Exact recursions against subset enumeration.
fn oracle_equivalence() -> Outcome {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for i in 0..200 {
        for regression in [false, true] {
            let n = r.random_range(1..=10);
            let k = [1, 2, 3][i % 3].min(n);
            let inst = instance(&mut r, n, regression);
            let spec = spec_for(regression, k);
            let exact = if regression {
                exact::shapley_unweighted_regression(&inst.ds, inst.query(), k)
            } else {
                exact::shapley_unweighted_classification(&inst.ds, inst.query(), k)
            }
            .unwrap();
            let oracle = KnnGame::new(&inst.ds, inst.query(), &spec).unwrap().subsets().unwrap();
            worst = worst.max(max_diff(&exact, &oracle));
            count += 1;
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(60));
    (worst <= TOL && fast, format!("{count} instances, max |exact - oracle| = {worst:.2e} (tol {TOL:.0e}), {time}"))
}

// 2. Weighted, seller and composite games against the oracle.
fn weighted_and_seller_exactness() -> Outcome {
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut r = rng(2);
    let opts = ExactOptions::default();
    let mut worst = [0.0f64; 4];
    for i in 0..50 {
        let regression = i % 2 == 1;
        let n = r.random_range(2..=8);
        let m = r.random_range(1..=n.min(6));
        let k = r.random_range(1..=3usize).min(n);
        let inst = instance(&mut r, n, regression);
        let q = inst.query();
        let weighted = spec_for(regression, k).with_weighting(Weighting::inverse_distance());
        let maybe_weighted = if i % 4 < 2 { weighted.clone() } else { spec_for(regression, k) };

        // weighted point game
        let got = exact::shapley_weighted(&inst.ds, q, &weighted, &opts).unwrap();
        let want = KnnGame::new(&inst.ds, q, &weighted).unwrap().subsets().unwrap();
        worst[0] = worst[0].max(max_diff(&got, &want));

        // seller game
        let map = seller_map(&mut r, n, m);
        let sellers = maybe_weighted.clone().with_sellers(map);
        let got = shapley_per_seller(&inst.ds, q, &sellers, &opts).unwrap();
        let want = KnnGame::new(&inst.ds, q, &sellers).unwrap().subsets().unwrap();
        worst[1] = worst[1].max(max_diff(&got, &want));

        // composite point game, analyst last
        let composite = maybe_weighted.clone().composite(true);
        let (v, a) = exact::shapley_composite(&inst.ds, q, &composite, &opts).unwrap();
        let mut want = KnnGame::new(&inst.ds, q, &composite).unwrap().subsets().unwrap();
        let wa = want.pop().unwrap();
        worst[2] = worst[2].max(max_diff(&v, &want)).max((a - wa).abs());

        // composite seller game
        let composite = sellers.composite(true);
        let (v, a) = shapley_per_seller_composite(&inst.ds, q, &composite, &opts).unwrap();
        let mut want = KnnGame::new(&inst.ds, q, &composite).unwrap().subsets().unwrap();
        let wa = want.pop().unwrap();
        worst[3] = worst[3].max(max_diff(&v, &want)).max((a - wa).abs());
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(300));
    let ok = worst.iter().all(|&w| w <= TOL) && fast;
    (
        ok,
        format!(
            "50 instances, max error weighted {:.1e}, seller {:.1e}, composite {:.1e}, seller-composite {:.1e} (tol {TOL:.0e}), {time}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

// 3. Truncation error and preserved rank differences.
fn truncation() -> Outcome {
    const DIFF_TOL: f64 = 1e-12;
    let mut r = rng(3);
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_diff: f64 = 0.0;
    let combos: Vec<(usize, f64)> = [1, 5].iter().flat_map(|&k| [0.05, 0.1, 0.5].map(move |e| (k, e))).collect();
    for i in 0..100 {
        let (k, eps) = combos[i % combos.len()];
        let n = 500;
        let features: Vec<f64> = (0..2 * n).map(|_| r.random_range(-1.0..1.0)).collect();
        let labels: Vec<u32> = (0..n).map(|_| r.random_range(0..2)).collect();
        let ds = Dataset::new(features, 2, Labels::Class(labels)).unwrap();
        let point = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
        let q = Query::new(&point, Target::Class(r.random_range(0..2)));
        let cfg = TruncationConfig::new(eps).unwrap();
        let exact = exact::shapley_unweighted_classification(&ds, q, k).unwrap();
        let approx = exact::shapley_truncated(&ds, q, k, &cfg).unwrap();
        let err = max_diff(&exact, &approx);
        ok &= err <= eps;
        worst_ratio = worst_ratio.max(err / eps);
        let order = rank_by_distance(&ds, &point).unwrap().order;
        let kstar = cfg.k_star(k);
        for w in order[..kstar.min(n)].windows(2) {
            let d = ((approx[w[0]] - approx[w[1]]) - (exact[w[0]] - exact[w[1]])).abs();
            worst_diff = worst_diff.max(d);
        }
    }
    ok &= worst_diff <= DIFF_TOL;
    (
        ok,
        format!(
            "100 instances (N=500), max error / epsilon = {worst_ratio:.3} (must be <= 1), \
             max rank-difference mismatch below K* = {worst_diff:.1e} (tol {DIFF_TOL:.0e})"
        ),
    )
}

// 4. Efficiency, symmetry, null player and additivity.
fn axioms() -> Outcome {
    const SUM_TOL: f64 = 1e-9;
    const SYM_TOL: f64 = 1e-12;
    const ADD_TOL: f64 = 1e-12;
    let mut r = rng(4);
    let opts = ExactOptions::default();
    let (mut sum_err, mut sym_err, mut null_err, mut add_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut sym_checked = 0;
    for i in 0..120 {
        let regression = i % 2 == 1;
        let variant = i / 2 % 5;
        let n = if variant == 0 { r.random_range(2..=60) } else { r.random_range(2..=9) };
        let k = r.random_range(1..=3usize).min(n);
        let inst = instance(&mut r, n, regression);
        let q = inst.query();
        let mut spec = spec_for(regression, k);
        if variant == 1 || variant == 4 {
            spec = spec.with_weighting(Weighting::inverse_distance());
        }
        if variant >= 2 {
            let m = r.random_range(1..=n.min(6));
            spec = spec.with_sellers(seller_map(&mut r, n, m));
        }
        if variant >= 3 {
            spec = spec.composite(true);
        }
        let all: Vec<usize> = (0..n).collect();
        let full = utility(&inst.ds, &all, q, &spec).unwrap();
        let total = if spec.composite {
            let (v, a) = if spec.sellers.is_some() {
                shapley_per_seller_composite(&inst.ds, q, &spec, &opts).unwrap()
            } else {
                exact::shapley_composite(&inst.ds, q, &spec, &opts).unwrap()
            };
            let members: Vec<usize> = (0..spec.players(&inst.ds)).collect();
            let cu = composite_utility(&inst.ds, &Coalition { members, analyst: true }, q, &spec).unwrap();
            sum_err = sum_err.max((cu - full).abs());
            v.iter().sum::<f64>() + a
        } else {
            exact::shapley_exact(&inst.ds, q, &spec, &opts).unwrap().iter().sum()
        };
        sum_err = sum_err.max((total - full).abs());
    }

    // Symmetry: a duplicated point on continuous data ties only with its copy.
    for i in 0..60 {
        let regression = i % 2 == 1;
        let n = r.random_range(2..=40);
        let k = r.random_range(1..=3usize).min(n);
        let mut features: Vec<f64> = (0..2 * n).map(|_| r.random_range(-3.0..3.0)).collect();
        let src = r.random_range(0..n);
        features.extend_from_slice(&[features[2 * src], features[2 * src + 1]]);
        let point = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let (labels, target) = if regression {
            let mut y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            y.push(y[src]);
            (Labels::Real(y), Target::Real(r.random_range(-2.0..2.0)))
        } else {
            let mut y: Vec<u32> = (0..n).map(|_| r.random_range(0..2)).collect();
            y.push(y[src]);
            (Labels::Class(y), Target::Class(r.random_range(0..2)))
        };
        let ds = Dataset::new(features, 2, labels).unwrap();
        let q = Query::new(&point, target);
        let mut spec = spec_for(regression, k);
        if i % 4 >= 2 && n <= 12 {
            spec = spec.with_weighting(Weighting::inverse_distance());
        }
        let v = exact::shapley_exact(&ds, q, &spec, &opts).unwrap();
        sym_err = sym_err.max((v[src] - v[n]).abs());
        sym_checked += 1;
    }

    // Null player: with no point matching the test label every coalition is
    // worth zero, so every value is zero; and a dummy player added to an
    // oracle game gets exactly zero.
    for _ in 0..20 {
        let n = r.random_range(1..=30);
        let k = r.random_range(1..=3usize).min(n);
        let features: Vec<f64> = (0..2 * n).map(|_| r.random_range(-3.0..3.0)).collect();
        let ds = Dataset::new(features, 2, Labels::Class(vec![0; n])).unwrap();
        let q = Query::new(&[0.0, 0.0], Target::Class(1));
        let v = exact::shapley_exact(&ds, q, &GameSpec::classification(k), &opts).unwrap();
        null_err = null_err.max(v.iter().fold(0.0f64, |a, b| a.max(b.abs())));
    }
    for _ in 0..20 {
        let n = r.random_range(1..=7);
        let k = r.random_range(1..=3usize).min(n);
        let inst = instance(&mut r, n, false);
        let spec = GameSpec::classification(k);
        let game = KnnGame::new(&inst.ds, inst.query(), &spec).unwrap();
        // player n is the dummy
        let v = shapley_bruteforce_subsets(n + 1, |c| {
            let real: Vec<usize> = c.iter().copied().filter(|&p| p < n).collect();
            game.value(&real)
        })
        .unwrap();
        null_err = null_err.max(v[n].abs());
    }

    // Additivity: values over a query set are the size-weighted mix of the
    // values over two halves.
    for i in 0..20 {
        let regression = i % 2 == 1;
        let n = r.random_range(5..=40);
        let k = r.random_range(1..=3usize).min(n);
        let inst = instance(&mut r, n, regression);
        let nq = r.random_range(2..=9);
        let rows: Vec<Vec<f64>> = (0..nq).map(|_| vec![r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)]).collect();
        let labels = if regression {
            Labels::Real((0..nq).map(|_| r.random_range(-2.0..2.0)).collect())
        } else {
            Labels::Class((0..nq).map(|_| r.random_range(0..3)).collect())
        };
        let qs = QuerySet::from_rows(&rows, labels).unwrap();
        let split = r.random_range(1..nq);
        let (a_idx, b_idx): (Vec<usize>, Vec<usize>) = ((0..split).collect(), (split..nq).collect());
        let spec = spec_for(regression, k);
        let whole = exact::value(&inst.ds, &qs, &spec, &opts).unwrap().values;
        let a = exact::value(&inst.ds, &qs.select(&a_idx).unwrap(), &spec, &opts).unwrap().values;
        let b = exact::value(&inst.ds, &qs.select(&b_idx).unwrap(), &spec, &opts).unwrap().values;
        let mix: Vec<f64> =
            a.iter().zip(&b).map(|(x, y)| (x * split as f64 + y * (nq - split) as f64) / nq as f64).collect();
        add_err = add_err.max(max_diff(&whole, &mix));
    }

    let ok = sum_err <= SUM_TOL && sym_err <= SYM_TOL && null_err == 0.0 && add_err <= ADD_TOL && sym_checked > 0;
    (
        ok,
        format!(
            "efficiency gap {sum_err:.1e} (tol {SUM_TOL:.0e}), duplicate-point gap {sym_err:.1e} (tol {SYM_TOL:.0e}), \
             null-player value {null_err:.1e} (must be 0), additivity gap {add_err:.1e} (tol {ADD_TOL:.0e})"
        ),
    )
}

// 5. Monte Carlo (epsilon, delta) guarantee with the Bennett sample size.
fn mc_guarantee() -> Outcome {
    const EPS: f64 = 0.1;
    const DELTA: f64 = 0.1;
    let start = Instant::now();
    let cfg = SynthConfig::classification(100, 4, 2, 5).with_clusters(4).with_separation(1.5).with_test(10);
    let (ds, qs) = generate(&cfg).unwrap();
    let qs = qs.unwrap();
    let spec = GameSpec::classification(1);
    let exact = exact::value(&ds, &qs, &spec, &ExactOptions::default()).unwrap().values;
    let mut good = 0;
    let mut worst: f64 = 0.0;
    let mut perms = 0;
    for seed in 0..50 {
        let res = estimate_shapley_mc(&ds, &qs, &spec, &McConfig::new(EPS, DELTA, Bound::Bennett, seed)).unwrap();
        perms = res.diagnostics.permutations.unwrap();
        let err = max_diff(&res.values, &exact);
        worst = worst.max(err);
        good += usize::from(err <= EPS);
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(600));
    (
        good * 10 >= 9 * 50 && fast,
        format!(
            "{good}/50 trials with max error <= {EPS} (need >= 45), worst {worst:.4}, {perms} permutations per trial, {time}"
        ),
    )
}

// 6. Bennett below Hoeffding and flat in N.
fn bennett_vs_hoeffding() -> Outcome {
    let tol = Tolerance::new(0.1, 0.1, 1.0).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut bennett = Vec::new();
    for n in [1_000, 10_000, 100_000] {
        let h = hoeffding_permutations(n, &tol);
        let b = bennett_permutations(n, 1, &tol).unwrap();
        ok &= b < h;
        bennett.push(b);
        parts.push(format!("N={n}: bennett {b} < hoeffding {h}"));
    }
    let flat = bennett.windows(2).all(|w| w[0] == w[1]);
    (ok && flat, format!("{}; bennett constant in N: {flat}", parts.join(", ")))
}

// 7. Exact valuation against the Hoeffding-sized Monte Carlo baseline.
fn speedup() -> Outcome {
    const MIN_SPEEDUP: f64 = 50.0;
    let rows = bench::exact_vs_baseline(&[1_000, 10_000, 100_000], &BenchConfig::default()).unwrap();
    let of = |method: &str| -> Vec<(usize, f64)> {
        rows.iter().filter(|r| r.method == method).map(|r| (r.n, r.speedup.unwrap())).collect()
    };
    let base = of("mc-baseline");
    let inc = of("mc-incremental");
    let at_1e4 = base.iter().find(|(n, _)| *n == 10_000).unwrap().1;
    let monotone = base.windows(2).all(|w| w[1].1 > w[0].1);
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(n, s)| format!("{n}:{s:.0}x")).collect::<Vec<_>>().join(" ");
    (
        at_1e4 >= MIN_SPEEDUP && monotone,
        format!(
            "speedup over baseline {} (need >= {MIN_SPEEDUP}x at N=1e4, increasing: {monotone}); \
             over incremental-heap MC {}; baseline runtimes projected from sampled steps",
            fmt(&base),
            fmt(&inc)
        ),
    )
}

fn collision_quadrature(c: f64, w: f64) -> f64 {
    let steps = 20_000;
    let h = w / steps as f64;
    let f = |u: f64| {
        let x = u / c;
        (2.0 / (2.0 * std::f64::consts::PI).sqrt()) * (-x * x / 2.0).exp() / c * (1.0 - u / w)
    };
    let mut s = f(0.0) + f(w);
    for i in 1..steps {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

// 8. LSH recall and error on high-contrast data, plus the collision law.
fn lsh() -> Outcome {
    const EPS: f64 = 0.1;
    const DELTA: f64 = 0.1;
    let k = 1;
    let cfg = SynthConfig::classification(10_000, 32, 2, 8).with_clusters(100).with_separation(4.0).with_test(100);
    let (ds, qs) = generate(&cfg).unwrap();
    let qs = qs.unwrap();
    let kstar = TruncationConfig::new(EPS).unwrap().k_star(k);
    let sel = select_params(&ds, &qs, &ParamRequest::new(kstar, DELTA / qs.len() as f64, 11)).unwrap();
    let index = LshIndex::build(&ds, sel.params).unwrap();
    let spec = GameSpec::classification(k);
    let (mut recalled, mut accurate) = (0, 0);
    for j in 0..qs.len() {
        let q = qs.query(j);
        let got = index.retrieve(&ds, q.point, kstar).unwrap();
        let truth = rank_by_distance(&ds, q.point).unwrap().order;
        recalled += usize::from(got.neighbors.iter().map(|p| p.0).eq(truth[..kstar].iter().copied()));
        let approx = shapley_lsh(&ds, &qs.select(&[j]).unwrap(), &spec, EPS, DELTA, &index).unwrap().values;
        let exact = exact::shapley_unweighted_classification(&ds, q, k).unwrap();
        accurate += usize::from(max_diff(&approx, &exact) <= EPS);
    }

    let mut quad: f64 = 0.0;
    for c in [0.05, 0.3, 1.0, 2.0, 5.0, 20.0] {
        for w in [0.5, 1.0, 4.0, 10.0] {
            quad = quad.max((collision_probability(c, w) - collision_quadrature(c, w)).abs());
        }
    }
    let mut r = rng(8);
    let trials = 100_000;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let (w, c) = (4.0, 1.0);
    let mut hits = 0u32;
    for _ in 0..trials {
        let a: f64 = normal.sample(&mut r);
        let b: f64 = r.random_range(0.0..w);
        hits += u32::from((b / w).floor() == ((a * c + b) / w).floor());
    }
    let p = collision_probability(c, w);
    let freq = hits as f64 / trials as f64;
    let z = (freq - p).abs() / (p * (1.0 - p) / trials as f64).sqrt();

    let nq = qs.len();
    let ok = recalled * 10 >= 9 * nq && accurate * 10 >= 9 * nq && z <= 3.0 && quad <= 1e-6;
    (
        ok,
        format!(
            "contrast {:.2}, m={} l={}: all-K* recall {recalled}/{nq} (need >= 90), error <= {EPS} on {accurate}/{nq} \
             (need >= 90); simulated collision off by {z:.2} SE (max 3), quadrature gap {quad:.1e} (tol 1e-6)",
            sel.contrast.contrast, sel.params.m, sel.params.l
        ),
    )
}

// 9. Exponent behavior.
fn g_behavior() -> Outcome {
    let unit = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().all(|&w| g_exponent(1.0, w) == 1.0);
    let cfg = SynthConfig::classification(5_000, 16, 2, 9).with_clusters(50).with_separation(3.0).with_test(100);
    let (ds, qs) = generate(&cfg).unwrap();
    let qs = qs.unwrap();
    let mut gs = Vec::new();
    for eps in [0.001, 0.01, 0.1, 1.0] {
        let kstar = TruncationConfig::new(eps).unwrap().k_star(1);
        let sel = select_params(&ds, &qs, &ParamRequest::new(kstar, 0.001, 9)).unwrap();
        gs.push((eps, sel.contrast.g_exponent, sel.contrast.contrast));
    }
    let nonincreasing = gs.windows(2).all(|w| w[1].1 <= w[0].1);

    let c = gs[2].2;
    let widths = [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0];
    let g: Vec<f64> = widths.iter().map(|&w| g_exponent(c, w)).collect();
    let deltas: Vec<f64> = g.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let knee = deltas.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let flattening = deltas[knee..].windows(2).all(|w| w[1] <= w[0]);
    let list = gs.iter().map(|(e, g, _)| format!("eps {e}: {g:.3}")).collect::<Vec<_>>().join(", ");
    (
        unit && nonincreasing && flattening,
        format!(
            "g(1) == 1 at every width: {unit}; {list} (nonincreasing in eps: {nonincreasing}); \
             width deltas shrink past width {}: {flattening}",
            widths[knee + 1]
        ),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", oracle_equivalence),
        ("weighted and seller exactness", weighted_and_seller_exactness),
        ("truncation", truncation),
        ("Shapley axioms", axioms),
        ("Monte Carlo guarantee", mc_guarantee),
        ("Bennett vs Hoeffding", bennett_vs_hoeffding),
        ("exact vs baseline speedup", speedup),
        ("LSH recall and error", lsh),
        ("g exponent", g_behavior),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = run();
        failed += usize::from(!pass);
        writeln!(
            out,
            "criterion {}: {} {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        )
        .unwrap();
        out.flush().unwrap();
    }
    writeln!(
        out,
        "criterion 10: NOT REPRODUCED full-scale runs (10^7 points, original runtime and accuracy tables); \
         covered by the trend checks in criteria 6-8"
    )
    .unwrap();
    if failed > 0 {
        writeln!(out, "{failed} criteria failed").unwrap();
        std::process::exit(1);
    }
}
