//! The `value` command: load data, build the game, run one method.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use knnsv::exact::{self, ExactOptions, TruncationConfig};
use knnsv::montecarlo::{estimate_shapley_mc, Bound, McConfig};
use knnsv::oracle::KnnGame;
use knnsv::{Dataset, GameSpec, Method, QuerySet, Task, UniformWeights, ValuationResult, Weighting};

use crate::error::{CliError, Result};
use crate::io::{self, Format};
use crate::output::{self, OutputFormat, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Exact,
    Truncated,
    Lsh,
    Mc,
    Weighted,
    Seller,
    Composite,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TaskArg {
    Classification,
    Regression,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Classification => Task::Classification,
            TaskArg::Regression => Task::Regression,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BoundArg {
    Hoeffding,
    Bennett,
    BennettApprox,
    Heuristic,
}

impl BoundArg {
    fn bound(self) -> Bound {
        match self {
            BoundArg::Hoeffding => Bound::Hoeffding,
            BoundArg::Bennett => Bound::Bennett,
            BoundArg::BennettApprox => Bound::BennettApprox,
            BoundArg::Heuristic => Bound::Heuristic,
        }
    }

    fn name(self) -> &'static str {
        match self {
            BoundArg::Hoeffding => "hoeffding",
            BoundArg::Bennett => "bennett",
            BoundArg::BennettApprox => "bennett-approx",
            BoundArg::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WeightsArg {
    /// Plain `1/K` vote.
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ValueArgs {
    #[arg(value_enum)]
    pub method: MethodArg,
    /// Training data (CSV, or `.bin` with a `.json` sidecar).
    #[arg(long)]
    pub train: PathBuf,
    /// Test queries, same layout as the training data.
    #[arg(long)]
    pub test: PathBuf,
    /// Name of the label column in CSV input.
    #[arg(long, default_value = "label")]
    pub label: String,
    /// Input format; inferred from the file extension when absent.
    #[arg(long, value_enum)]
    pub input_format: Option<Format>,
    #[arg(long, value_enum, default_value_t = TaskArg::Classification)]
    pub task: TaskArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Approximation error for truncated, lsh and mc [default: 0.1].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Failure probability for lsh and mc [default: 0.1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Sample-size rule for mc [default: bennett].
    #[arg(long, value_enum)]
    pub bound: Option<BoundArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seller file: one seller id per training row, or `point,seller` pairs.
    #[arg(long, conflicts_with = "seller_column")]
    pub sellers: Option<PathBuf>,
    /// Training CSV column holding seller ids.
    #[arg(long)]
    pub seller_column: Option<String>,
    /// Add the analyst as a player (implied by `composite`); applies to
    /// exact, mc and oracle.
    #[arg(long)]
    pub composite: bool,
    /// Neighbor weights. `weighted` defaults to inverse-distance, the other
    /// methods to the unweighted vote.
    #[arg(long, value_enum)]
    pub weights: Option<WeightsArg>,
    /// Work budget (subsets per query) for weighted and seller enumeration.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Run enumerations even when they exceed the budget.
    #[arg(long)]
    pub budget_override: bool,
    /// Hard cap on mc permutations.
    #[arg(long)]
    pub max_permutations: Option<u64>,
    /// Half-width of the marginal-contribution range assumed by mc bounds.
    #[arg(long)]
    pub range: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

/// Loaded inputs and the game they define.
pub struct Prepared {
    pub train: Dataset,
    pub test: QuerySet,
    pub spec: GameSpec,
}

pub fn prepare(args: &ValueArgs) -> Result<Prepared> {
    let task: Task = args.task.into();
    let loaded = io::read_dataset(&args.train, args.input_format, &args.label, task, args.seller_column.as_deref())?;
    if let (Some(col), None) = (&args.seller_column, &loaded.sellers) {
        return Err(CliError::Data(format!("{}: no seller column named {col:?}", args.train.display())));
    }
    let test = io::read_dataset(&args.test, args.input_format, &args.label, task, args.seller_column.as_deref())?.dataset;
    let train = loaded.dataset;
    if test.dim() != train.dim() {
        return Err(CliError::Data(format!(
            "{} has {} features but {} has {}",
            args.test.display(),
            test.dim(),
            args.train.display(),
            train.dim()
        )));
    }

    let sellers = match (&args.sellers, loaded.sellers) {
        (Some(path), _) => Some(io::read_sellers(path, train.len())?),
        (None, Some(ids)) => Some(knnsv::SellerMap::from_labels(&ids)?),
        (None, None) => None,
    };
    let weighting = match (args.weights, args.method) {
        (Some(WeightsArg::InverseDistance), _) | (None, MethodArg::Weighted) => Weighting::inverse_distance(),
        (Some(WeightsArg::Uniform), MethodArg::Weighted) => Weighting::Weighted(Arc::new(UniformWeights)),
        _ => Weighting::Unweighted,
    };

    let restricted = matches!(args.method, MethodArg::Lsh | MethodArg::Truncated);
    if restricted {
        let name = if args.method == MethodArg::Lsh { "lsh" } else { "truncated" };
        if task == Task::Regression {
            return usage(format!("{name} valuation covers classification only; use exact or mc for regression"));
        }
        if weighting.is_weighted() {
            return usage(format!("{name} valuation covers the unweighted vote only; use weighted or mc"));
        }
        if sellers.is_some() {
            return usage(format!("{name} valuation values individual points; use seller or mc with sellers"));
        }
        if args.composite {
            return usage(format!("{name} valuation has no analyst player; use composite or mc --composite"));
        }
    }
    if args.method == MethodArg::Seller && sellers.is_none() {
        return usage("seller valuation needs --sellers or --seller-column");
    }
    if args.k == 0 || args.k > train.len() {
        return usage(format!("--k must lie in 1..={}, got {}", train.len(), args.k));
    }

    let mut spec = match task {
        Task::Classification => GameSpec::classification(args.k),
        Task::Regression => GameSpec::regression(args.k),
    }
    .with_weighting(weighting)
    .composite(args.composite || args.method == MethodArg::Composite);
    if let Some(map) = sellers {
        spec = spec.with_sellers(map);
    }
    Ok(Prepared { train, test: QuerySet::from_dataset(test), spec })
}

fn epsilon(args: &ValueArgs) -> Result<f64> {
    let e = args.epsilon.unwrap_or(0.1);
    if !(e > 0.0 && e.is_finite()) {
        return usage(format!("--epsilon must be positive, got {e}"));
    }
    Ok(e)
}

fn delta(args: &ValueArgs) -> Result<f64> {
    let d = args.delta.unwrap_or(0.1);
    if !(d > 0.0 && d < 1.0) {
        return usage(format!("--delta must lie in (0, 1), got {d}"));
    }
    Ok(d)
}

fn oracle(p: &Prepared) -> Result<ValuationResult> {
    let mut sum: Vec<f64> = Vec::new();
    for q in p.test.iter() {
        let v = KnnGame::new(&p.train, q, &p.spec)?.subsets()?;
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        sum.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
    }
    let nq = p.test.len() as f64;
    sum.iter_mut().for_each(|v| *v /= nq);
    let analyst = p.spec.composite.then(|| sum.pop().expect("analyst is a player"));
    let mut res = ValuationResult::new(sum, Method::Oracle);
    res.analyst_value = analyst;
    Ok(res)
}

/// Runs the method and returns the result with the echoed config.
pub fn compute(args: &ValueArgs, p: &Prepared) -> Result<(ValuationResult, RunConfig)> {
    let mut config = RunConfig {
        task: p.spec.task,
        k: p.spec.k,
        weights: p.spec.weighting.name().to_string(),
        n_train: p.train.len(),
        n_test: p.test.len(),
        sellers: p.spec.sellers.as_ref().map(|m| m.sellers()),
        epsilon: None,
        delta: None,
        bound: None,
        seed: None,
    };
    let mut opts = ExactOptions { override_budget: args.budget_override, ..ExactOptions::default() };
    if let Some(b) = args.budget {
        opts.budget = b;
        opts.seller_budget = b;
    }
    let res = match args.method {
        MethodArg::Exact | MethodArg::Weighted | MethodArg::Seller | MethodArg::Composite => {
            exact::value(&p.train, &p.test, &p.spec, &opts)?
        }
        MethodArg::Oracle => oracle(p)?,
        MethodArg::Truncated => {
            let e = epsilon(args)?;
            config.epsilon = Some(e);
            exact::value_truncated(&p.train, &p.test, p.spec.k, &TruncationConfig::new(e)?)?
        }
        MethodArg::Lsh => {
            let (e, d) = (epsilon(args)?, delta(args)?);
            config.epsilon = Some(e);
            config.delta = Some(d);
            config.seed = Some(args.seed);
            knnsv::lsh::value(&p.train, &p.test, &p.spec, e, d, args.seed)?.0
        }
        MethodArg::Mc => {
            let (e, d) = (epsilon(args)?, delta(args)?);
            let bound = args.bound.unwrap_or(BoundArg::Bennett);
            config.epsilon = Some(e);
            config.delta = Some(d);
            config.bound = Some(bound.name().into());
            config.seed = Some(args.seed);
            let mut mc = McConfig::new(e, d, bound.bound(), args.seed);
            if let Some(r) = args.range {
                mc = mc.with_range(r);
            }
            if let Some(m) = args.max_permutations {
                mc.max_permutations = m;
            }
            estimate_shapley_mc(&p.train, &p.test, &p.spec, &mc)?
        }
    };
    Ok((res, config))
}

/// Full command: returns the rendered result, which is also written to
/// `--out` or stdout.
pub fn run(args: &ValueArgs) -> Result<String> {
    let start = Instant::now();
    let prepared = prepare(args)?;
    let (res, config) = compute(args, &prepared)?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let text = match args.format {
        OutputFormat::Json => output::to_json(&res, &config, ms),
        OutputFormat::Csv => output::to_csv(&res),
    };
    output::write(&text, args.out.as_deref())?;
    for w in &res.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    Ok(text)
}
