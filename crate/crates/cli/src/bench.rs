//! Scaling comparisons written as CSV rows.
//!
//! Exact timings are measured end to end. Sampling runs that would take
//! hours at the larger sizes are timed on a sample of their work and
//! projected to the full permutation count; those rows say `projected` in
//! the `timing` column.

use std::time::Instant;

use knnsv::exact::{self, ExactOptions};
use knnsv::montecarlo::{
    bennett_approx_permutations, bennett_permutations, estimate_shapley_mc, hoeffding_permutations,
    required_permutations, Bound, Evaluation, McConfig, PermutationState, Tolerance,
};
use knnsv::utility::RankedQuery;
use knnsv::{Dataset, GameSpec, QuerySet, Task, Weighting};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    ExactVsBaseline,
    BennettVsHoeffding,
    WeightedExactVsMc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub runtime_ms: f64,
    pub permutations: Option<u64>,
    /// Largest absolute deviation from the exact values.
    pub error: Option<f64>,
    /// Runtime relative to the exact method at the same size.
    pub speedup: Option<f64>,
    pub projected: bool,
}

impl BenchRow {
    fn measured(method: &str, n: usize, k: usize, runtime_ms: f64) -> Self {
        Self {
            method: method.into(),
            n,
            k,
            runtime_ms,
            permutations: None,
            error: None,
            speedup: None,
            projected: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub d: usize,
    pub n_test: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { d: 32, n_test: 100, epsilon: 0.1, delta: 0.1, seed: 7 }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("method,n,k,runtime_ms,permutations,error,speedup,timing\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{:.3},{},{},{},{}\n",
            r.method,
            r.n,
            r.k,
            r.runtime_ms,
            opt(r.permutations),
            opt(r.error.map(|e| format!("{e:.3e}"))),
            opt(r.speedup.map(|e| format!("{e:.4}"))),
            if r.projected { "projected" } else { "measured" }
        ));
    }
    s
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Mean cost of one from-scratch prefix evaluation, in milliseconds,
/// sampled at 32 stratified prefix lengths over a few queries.
fn from_scratch_step_ms(ds: &Dataset, qs: &QuerySet, k: usize, seed: u64) -> Result<f64> {
    const POSITIONS: usize = 32;
    const REPS: usize = 16;
    let n = ds.len();
    let weighting = Weighting::Unweighted;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    let mut steps = 0usize;
    for j in 0..qs.len().min(4) {
        let rq = RankedQuery::new(ds, qs.query(j), Task::Classification)?;
        order.shuffle(&mut rng);
        for i in 0..POSITIONS {
            let p = ((i as f64 + 0.5) * n as f64 / POSITIONS as f64) as usize;
            let p = p.min(n.saturating_sub(REPS));
            let mut st = PermutationState::new(&rq, &weighting, k, Evaluation::FromScratch);
            st.insert(order[..p].iter().map(|&x| rq.rank_of[x]));
            let start = Instant::now();
            for &x in &order[p..p + REPS] {
                std::hint::black_box(st.insert(std::iter::once(rq.rank_of[x])));
            }
            total += ms(start);
            steps += REPS;
        }
    }
    Ok(total / steps as f64)
}

/// Exact valuation against permutation sampling sized by Hoeffding, with
/// utilities recomputed from scratch (the baseline) and with the
/// incremental heap. All runs use one thread.
pub fn exact_vs_baseline(sizes: &[usize], cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let k = 1;
    let mut rows = Vec::new();
    for &n in sizes {
        let (ds, qs) = generate(&SynthConfig::classification(n, cfg.d, 2, cfg.seed).with_clusters(10).with_test(cfg.n_test))?;
        let qs = qs.expect("bench data has queries");
        let spec = GameSpec::classification(k);

        let start = Instant::now();
        single_thread(|| exact::value(&ds, &qs, &spec, &ExactOptions::default()))??;
        let exact_ms = ms(start);
        rows.push(BenchRow::measured("exact", n, k, exact_ms));

        let mc = McConfig::new(cfg.epsilon, cfg.delta, Bound::Hoeffding, cfg.seed);
        let t = required_permutations(&ds, &qs, &spec, &mc)?.expect("hoeffding gives a count");

        let step = single_thread(|| from_scratch_step_ms(&ds, &qs, k, cfg.seed))??;
        let baseline = exact_ms + t as f64 * (n * qs.len()) as f64 * step;
        rows.push(BenchRow {
            permutations: Some(t),
            speedup: Some(baseline / exact_ms),
            projected: true,
            ..BenchRow::measured("mc-baseline", n, k, baseline)
        });

        let sample = 8;
        let timed = McConfig { max_permutations: sample, ..mc.clone() };
        let start = Instant::now();
        single_thread(|| estimate_shapley_mc(&ds, &qs, &spec, &timed))??;
        let per_perm = ((ms(start) - exact_ms) / sample as f64).max(0.0);
        let incremental = exact_ms + t as f64 * per_perm;
        rows.push(BenchRow {
            permutations: Some(t),
            speedup: Some(incremental / exact_ms),
            projected: true,
            ..BenchRow::measured("mc-incremental", n, k, incremental)
        });
    }
    Ok(rows)
}

/// Permutation counts of the three bounds for `K`-NN classification with
/// range `r`.
pub fn bennett_vs_hoeffding(sizes: &[usize], k: usize, range: f64, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let tol = Tolerance::new(cfg.epsilon, cfg.delta, range)?;
    let mut rows = Vec::new();
    for &n in sizes {
        let start = Instant::now();
        let h = hoeffding_permutations(n, &tol);
        rows.push(BenchRow { permutations: Some(h), ..BenchRow::measured("hoeffding", n, k, ms(start)) });
        let start = Instant::now();
        let b = bennett_permutations(n, k, &tol)?;
        rows.push(BenchRow { permutations: Some(b), ..BenchRow::measured("bennett", n, k, ms(start)) });
        let start = Instant::now();
        let a = bennett_approx_permutations(k, &tol);
        rows.push(BenchRow { permutations: Some(a), ..BenchRow::measured("bennett-approx", n, k, ms(start)) });
    }
    Ok(rows)
}

/// Exact weighted enumeration against Bennett-sized sampling over a sweep
/// of `K` at fixed `N`.
pub fn weighted_exact_vs_mc(n: usize, ks: &[usize], cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let (ds, qs) = generate(&SynthConfig::classification(n, cfg.d, 2, cfg.seed).with_clusters(4).with_test(cfg.n_test))?;
    let qs = qs.expect("bench data has queries");
    let mut rows = Vec::new();
    for &k in ks {
        let spec = GameSpec::classification(k).with_weighting(Weighting::inverse_distance());
        let opts = ExactOptions { override_budget: true, ..ExactOptions::default() };
        let start = Instant::now();
        let exact = exact::value(&ds, &qs, &spec, &opts)?;
        let exact_ms = ms(start);
        rows.push(BenchRow::measured("weighted-exact", n, k, exact_ms));

        let mc = McConfig::new(cfg.epsilon, cfg.delta, Bound::Bennett, cfg.seed);
        let start = Instant::now();
        let est = estimate_shapley_mc(&ds, &qs, &spec, &mc)?;
        let mc_ms = ms(start);
        rows.push(BenchRow {
            permutations: est.diagnostics.permutations,
            error: Some(max_abs_diff(&est.values, &exact.values)),
            speedup: Some(mc_ms / exact_ms),
            ..BenchRow::measured("weighted-mc", n, k, mc_ms)
        });
    }
    Ok(rows)
}
