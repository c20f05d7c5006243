use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ebm_core::greedy::GreedyOptions;
use ebm_core::harness::{
    generate_synthetic, parse_probability_scheme, run_experiment, write_csv, write_edges,
    Algorithm, EconomicsSetting, ExperimentConfig, HarnessError, SyntheticKind,
};
use ebm_core::hop::HopConfig;

#[derive(Parser)]
#[command(
    name = "ebm",
    version,
    about = "Earned benefit maximization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a budget sweep and write one CSV row per (budget, algorithm).
    Run(RunArgs),
    /// Write a synthetic undirected edge list.
    Generate(GenerateArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Treat edges as directed arcs.
    #[arg(long)]
    directed: bool,
    /// `uniform:P` or `trivalency`.
    #[arg(long, default_value = "uniform:0.1")]
    prob: String,
    /// `random` or `degprop`.
    #[arg(long, default_value = "random")]
    econ: String,
    #[arg(long = "target-frac", default_value_t = 0.2)]
    target_frac: f64,
    /// Comma-separated budgets; defaults to the sweep for the cost setting.
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<f64>>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "igaag,igaip,hbh,maxdeg,degdis,sindis"
    )]
    algos: Vec<String>,
    /// Live-edge samples per estimator.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    hop: usize,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Held-out evaluation repetitions.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Estimator worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Write 0 in the seconds column so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Permit the eager greedy on graphs above 5000 nodes.
    #[arg(long)]
    allow_slow_igaag: bool,
    /// Greedy keeps buying zero-gain nodes while budget remains.
    #[arg(long)]
    strict: bool,
    /// Hop heuristic stops at the first zero score.
    #[arg(long)]
    skip_zero: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Random,
    Preferential,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Average degree (random) or links per new node (preferential).
    #[arg(long)]
    param: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let economics: EconomicsSetting = args.econ.parse()?;
    let mut config = ExperimentConfig::new(args.graph);
    config.directed = args.directed;
    config.probability = parse_probability_scheme(&args.prob)?;
    config.economics = economics;
    config.target_fraction = args.target_frac;
    config.budgets = args.budgets.unwrap_or_else(|| economics.default_budgets());
    config.algorithms = args
        .algos
        .iter()
        .map(|a| a.parse::<Algorithm>())
        .collect::<Result<_, _>>()?;
    config.samples = args.samples;
    config.hop = HopConfig {
        hops: args.hop,
        alpha: args.alpha,
        skip_zero: args.skip_zero,
    };
    config.seed = args.seed;
    config.reps = args.reps;
    config.out = args.out.clone();
    config.threads = args.threads;
    config.timing = !args.no_timing;
    config.allow_slow_igaag = args.allow_slow_igaag;
    config.greedy = GreedyOptions {
        strict: args.strict,
    };

    let rows = run_experiment(&config)?;
    if args.out.is_none() {
        write_csv(std::io::stdout().lock(), &rows)?;
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let kind = match args.kind {
        Kind::Random => SyntheticKind::Random {
            avg_degree: args.param,
        },
        Kind::Preferential => {
            if args.param < 1.0 || args.param.fract() != 0.0 {
                return Err(HarnessError::Config(format!(
                    "preferential attachment needs a positive integer param, got {}",
                    args.param
                )));
            }
            SyntheticKind::Preferential {
                m0: args.param as usize,
            }
        }
    };
    let edges = generate_synthetic(kind, args.n, args.seed)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    write_edges(&mut out, &edges)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Generate(args) => generate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
