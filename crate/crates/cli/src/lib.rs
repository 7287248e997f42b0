//! Command-line front end: ingestion, synthetic data, valuation runs and
//! scaling benchmarks.

pub mod bench;
pub mod error;
pub mod io;
pub mod output;
pub mod synth;
pub mod value;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "knnsv", version, about = "Shapley values of training points for K-nearest-neighbor models")]
pub struct Cli {
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value training points (or sellers) against a test set.
    Value(value::ValueArgs),
    /// Write a seeded synthetic dataset.
    Synth(SynthArgs),
    /// Run a scaling comparison and print CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthKindArg {
    Classification,
    Regression,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKindArg::Classification)]
    pub kind: SynthKindArg,
    #[arg(long)]
    pub n: usize,
    /// Test points drawn alongside, written to a separate file.
    #[arg(long, default_value_t = 0)]
    pub test_n: usize,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub classes: u32,
    /// Mixture components [default: one per class, or one for regression].
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Spread of the cluster centers; larger values raise the contrast.
    #[arg(long, default_value_t = 2.0)]
    pub separation: f64,
    /// Standard deviation of the regression label noise.
    #[arg(long, default_value_t = 0.1)]
    pub label_noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix: writes `<out>-train.<ext>` and `<out>-test.<ext>`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = io::Format::Csv)]
    pub format: io::Format,
    /// Float width of binary output.
    #[arg(long, value_enum, default_value_t = io::DType::F64)]
    pub dtype: io::DType,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub scenario: bench::Scenario,
    /// Training sizes, comma separated [default depends on the scenario].
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// K values for the weighted sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 32)]
    pub d: usize,
    #[arg(long, default_value_t = 100)]
    pub test_n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn synth(args: &SynthArgs) -> Result<Vec<PathBuf>> {
    let cfg = match args.kind {
        SynthKindArg::Classification => synth::SynthConfig::classification(args.n, args.d, args.classes, args.seed),
        SynthKindArg::Regression => synth::SynthConfig::regression(args.n, args.d, args.label_noise, args.seed),
    };
    let mut cfg = cfg.with_test(args.test_n).with_separation(args.separation);
    if let Some(c) = args.clusters {
        cfg = cfg.with_clusters(c);
    }
    let (train, test) = synth::generate(&cfg)?;
    let path = |part: &str| {
        let mut name = args.out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(format!("-{part}.{}", args.format.extension()));
        args.out.with_file_name(name)
    };
    let write = |ds: &knnsv::Dataset, p: &std::path::Path| match args.format {
        io::Format::Csv => io::write_csv(ds, p, "label"),
        io::Format::Bin => io::write_binary(ds, p, args.dtype),
    };
    let mut written = vec![path("train")];
    write(&train, &written[0])?;
    if let Some(test) = test {
        written.push(path("test"));
        write(test.as_dataset(), &written[1])?;
    }
    Ok(written)
}

pub fn bench(args: &BenchArgs) -> Result<String> {
    let cfg = bench::BenchConfig { d: args.d, n_test: args.test_n, epsilon: args.epsilon, delta: args.delta, seed: args.seed };
    let sizes = |default: &[usize]| if args.sizes.is_empty() { default.to_vec() } else { args.sizes.clone() };
    let rows = match args.scenario {
        bench::Scenario::ExactVsBaseline => bench::exact_vs_baseline(&sizes(&[1_000, 10_000, 100_000]), &cfg)?,
        bench::Scenario::BennettVsHoeffding => {
            bench::bennett_vs_hoeffding(&sizes(&[100, 1_000, 10_000, 100_000]), 1, 1.0, &cfg)?
        }
        bench::Scenario::WeightedExactVsMc => {
            let n = sizes(&[100])[0];
            bench::weighted_exact_vs_mc(n, &args.ks, &cfg)?
        }
    };
    let text = bench::to_csv(&rows);
    output::write(&text, args.out.as_deref())?;
    Ok(text)
}

/// Runs a parsed command line inside a pool of the requested size.
pub fn run(cli: &Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Value(a) => value::run(a).map(drop),
        Command::Synth(a) => {
            for p in synth(a)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Bench(a) => bench(a).map(drop),
    })
}
