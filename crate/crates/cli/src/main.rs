//! Benchmark CLI for incremental PageRank on dynamic graphs.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dfrank_core::dynamics::PlanError;
use dfrank_core::graph::GraphError;
use dfrank_core::harness::{self, ExperimentConfig, RunRecord, CSV_HEADER, SUMMARY_HEADER};
use dfrank_core::io::{self, DatasetDescriptor, GraphFormat, IoError, LoadedGraph, LoadedTemporal};
use dfrank_core::rank::{PrOptions, Strategy};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "dfrank",
    version,
    about = "Static and incremental PageRank benchmarks on dynamic graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a temporal dataset: preload, then consecutive batch updates
    Temporal(TemporalArgs),
    /// Apply seeded random batch updates to a static dataset
    Random(RandomArgs),
    /// Strong-scaling sweep of the temporal experiment over thread counts
    Scaling(ScalingArgs),
    /// Dump final ranks as an original-id TSV
    Ranks(RanksArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Damping factor
    #[arg(long, default_value_t = 0.85)]
    alpha: f64,
    /// Iteration tolerance (L-infinity)
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Frontier tolerance (relative rank change that expands the frontier)
    #[arg(long, default_value_t = 1e-6)]
    frontier_tol: f64,
    /// Prune tolerance (relative rank change below which a vertex is unmarked)
    #[arg(long, default_value_t = 1e-6)]
    prune_tol: f64,
    /// Maximum sweeps per run
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
}

impl SolverArgs {
    fn options(&self) -> Result<PrOptions, CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::Validation(format!(
                "--alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.tol <= 0.0 {
            return Err(CliError::Validation("--tol must be positive".to_string()));
        }
        if self.max_iters == 0 {
            return Err(CliError::Validation(
                "--max-iters must be at least 1".to_string(),
            ));
        }
        Ok(PrOptions {
            alpha: self.alpha,
            tol: self.tol,
            frontier_tol: self.frontier_tol,
            prune_tol: self.prune_tol,
            max_iters: self.max_iters,
            ..PrOptions::default()
        })
    }
}

#[derive(Args)]
struct TemporalArgs {
    /// Temporal dataset (whitespace-separated SRC DST UNIXTIME lines)
    #[arg(long)]
    input: PathBuf,
    /// Batch sizes as fractions of the temporal edge count
    #[arg(long, value_delimiter = ',', default_values_t = [1e-5, 1e-4, 1e-3])]
    fractions: Vec<f64>,
    /// Comma-separated strategies: static, nd, dt, df, dfp
    #[arg(long, value_delimiter = ',', default_value = "static,nd,dt,df,dfp")]
    strategies: Vec<String>,
    /// Worker threads (fallback: DFRANK_THREADS, then 1)
    #[arg(long)]
    threads: Option<usize>,
    /// PRNG seed recorded in the output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Batches per fraction
    #[arg(long, default_value_t = 100)]
    batches: usize,
    /// Fraction of the stream preloaded before the first batch
    #[arg(long, default_value_t = 0.90)]
    preload: f64,
    /// Recompute the reference every k-th batch
    #[arg(long, default_value_t = 1)]
    ref_every: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional aggregated summary CSV path
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct RandomArgs {
    /// Static dataset (edge list or Matrix Market)
    #[arg(long)]
    input: PathBuf,
    /// Explicit input format instead of extension detection
    #[arg(long, value_parser = ["edges", "mtx", "temporal"])]
    format: Option<String>,
    /// Treat edge-list input as undirected (mirror every edge)
    #[arg(long)]
    undirected: bool,
    /// Batch sizes as fractions of the edge count
    #[arg(long, value_delimiter = ',', default_values_t = [1e-7, 1e-6, 1e-5, 1e-4, 1e-3])]
    fractions: Vec<f64>,
    /// Insertion fraction of each batch
    #[arg(long, default_value_t = 0.8)]
    mix: f64,
    /// Seeded batches per fraction
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Comma-separated strategies: static, nd, dt, df, dfp
    #[arg(long, value_delimiter = ',', default_value = "static,nd,dt,df,dfp")]
    strategies: Vec<String>,
    /// Worker threads (fallback: DFRANK_THREADS, then 1)
    #[arg(long)]
    threads: Option<usize>,
    /// Base PRNG seed; trial t uses seed + t
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional aggregated summary CSV path
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ScalingArgs {
    /// Temporal dataset
    #[arg(long)]
    input: PathBuf,
    /// Batch-size fraction of the temporal edge count
    #[arg(long, default_value_t = 1e-4)]
    fraction: f64,
    /// Comma-separated thread counts to sweep
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4])]
    threads: Vec<usize>,
    /// Comma-separated strategies: static, nd, dt, df, dfp
    #[arg(long, value_delimiter = ',', default_value = "df,dfp")]
    strategies: Vec<String>,
    /// PRNG seed recorded in the output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Batches per thread count
    #[arg(long, default_value_t = 100)]
    batches: usize,
    /// Fraction of the stream preloaded before the first batch
    #[arg(long, default_value_t = 0.90)]
    preload: f64,
    /// Recompute the reference every k-th batch
    #[arg(long, default_value_t = 1)]
    ref_every: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    /// Optional aggregated summary CSV path
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct RanksArgs {
    /// Input dataset
    #[arg(long)]
    input: PathBuf,
    /// Explicit input format instead of extension detection
    #[arg(long, value_parser = ["edges", "mtx", "temporal"])]
    format: Option<String>,
    /// Treat edge-list input as undirected (mirror every edge)
    #[arg(long)]
    undirected: bool,
    /// Strategy used for the final update
    #[arg(long, default_value = "dfp")]
    strategy: String,
    /// Worker threads (fallback: DFRANK_THREADS, then 1)
    #[arg(long)]
    threads: Option<usize>,
    /// PRNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Preload fraction for temporal input
    #[arg(long, default_value_t = 0.90)]
    preload: f64,
    /// Output TSV path
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

enum CliError {
    Validation(String),
    Io(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse { .. } => CliError::Validation(e.to_string()),
            IoError::Io(_) | IoError::Csv(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Temporal(args) => cmd_temporal(args),
        Command::Random(args) => cmd_random(args),
        Command::Scaling(args) => cmd_scaling(args),
        Command::Ranks(args) => cmd_ranks(args),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    let threads = match flag {
        Some(t) => t,
        None => match std::env::var("DFRANK_THREADS") {
            Ok(v) => v.parse().map_err(|_| {
                CliError::Validation(format!(
                    "DFRANK_THREADS must be a positive integer, got '{v}'"
                ))
            })?,
            Err(_) => 1,
        },
    };
    if threads == 0 {
        return Err(CliError::Validation(
            "thread count must be at least 1".to_string(),
        ));
    }
    Ok(threads)
}

fn parse_strategies(names: &[String]) -> Result<Vec<Strategy>, CliError> {
    if names.is_empty() {
        return Err(CliError::Validation("no strategies given".to_string()));
    }
    let mut strategies = Vec::new();
    for name in names {
        let s = Strategy::from_str(name).map_err(CliError::Validation)?;
        if !strategies.contains(&s) {
            strategies.push(s);
        }
    }
    Ok(strategies)
}

fn check_fractions(fractions: &[f64]) -> Result<(), CliError> {
    if fractions.is_empty() {
        return Err(CliError::Validation("no batch fractions given".to_string()));
    }
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(CliError::Validation(format!(
                "batch fraction {f} outside (0, 1]"
            )));
        }
    }
    Ok(())
}

fn check_plan(preload: f64, batches: usize) -> Result<(), CliError> {
    if !(preload > 0.0 && preload <= 1.0) {
        return Err(CliError::Validation(format!(
            "--preload must lie in (0, 1], got {preload}"
        )));
    }
    if batches == 0 {
        return Err(CliError::Validation(
            "--batches must be at least 1".to_string(),
        ));
    }
    Ok(())
}

fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_temporal_input(path: &Path) -> Result<LoadedTemporal, CliError> {
    let loaded = io::load_temporal(path)?;
    println!(
        "loaded {}: |V| = {}, |E_T| = {}",
        graph_name(path),
        loaded.stream.num_vertices(),
        loaded.stream.num_events()
    );
    Ok(loaded)
}

fn load_static_input(
    path: &Path,
    format: Option<&str>,
    undirected: bool,
) -> Result<LoadedGraph, CliError> {
    let mut descriptor = DatasetDescriptor::detect(path, !undirected);
    match format {
        Some("edges") => descriptor.format = GraphFormat::EdgeList,
        Some("mtx") => descriptor.format = GraphFormat::MatrixMarket,
        Some("temporal") => descriptor.format = GraphFormat::TemporalEdgeList,
        Some(other) => return Err(CliError::Validation(format!("unknown format '{other}'"))),
        None => {}
    }
    let loaded = descriptor.load()?;
    println!(
        "loaded {}: |V| = {}, |E| = {} (self-loops included)",
        graph_name(path),
        loaded.graph.num_vertices(),
        loaded.graph.num_edges()
    );
    Ok(loaded)
}

fn write_outputs(rows: &[RunRecord], out: &Path, summary: Option<&Path>) -> Result<(), CliError> {
    io::write_csv(out, &CSV_HEADER, rows.iter().map(RunRecord::to_row))?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    let summaries = harness::summarize(rows);
    println!("strategy fraction threads geomean_elapsed_s geomean_l1");
    for s in &summaries {
        println!(
            "{:>8} {:>9.1e} {:>7} {:>17.3e} {}",
            s.strategy.code(),
            s.fraction,
            s.threads,
            s.geomean_elapsed_s,
            s.geomean_l1
                .map(|x| format!("{x:.3e}"))
                .unwrap_or_else(|| "-".to_string()),
        );
    }
    if let Some(path) = summary {
        io::write_csv(path, &SUMMARY_HEADER, summaries.iter().map(|s| s.to_row()))?;
        println!("wrote summary to {}", path.display());
    }
    Ok(())
}

fn cmd_temporal(args: TemporalArgs) -> Result<(), CliError> {
    check_fractions(&args.fractions)?;
    let strategies = parse_strategies(&args.strategies)?;
    let threads = resolve_threads(args.threads)?;
    check_plan(args.preload, args.batches)?;
    let opts = args.solver.options()?;
    let loaded = load_temporal_input(&args.input)?;
    let cfg = ExperimentConfig {
        graph_name: graph_name(&args.input),
        strategies,
        threads,
        seed: args.seed,
        num_batches: args.batches,
        preload: args.preload,
        ref_every: args.ref_every,
        opts,
        ..ExperimentConfig::default()
    };
    let rows = harness::run_temporal(&loaded.stream, &args.fractions, &cfg)?;
    if rows.iter().any(|r| r.truncated) {
        eprintln!("warning: stream exhausted before the requested batches; plan truncated");
    }
    write_outputs(&rows, &args.out, args.summary.as_deref())
}

fn cmd_random(args: RandomArgs) -> Result<(), CliError> {
    check_fractions(&args.fractions)?;
    let strategies = parse_strategies(&args.strategies)?;
    let threads = resolve_threads(args.threads)?;
    if !(0.0..=1.0).contains(&args.mix) {
        return Err(CliError::Validation(format!(
            "--mix must lie in [0, 1], got {}",
            args.mix
        )));
    }
    if args.trials == 0 {
        return Err(CliError::Validation(
            "--trials must be at least 1".to_string(),
        ));
    }
    let opts = args.solver.options()?;
    let loaded = load_static_input(&args.input, args.format.as_deref(), args.undirected)?;
    let cfg = ExperimentConfig {
        graph_name: graph_name(&args.input),
        strategies,
        threads,
        seed: args.seed,
        trials: args.trials,
        mix: args.mix,
        opts,
        ..ExperimentConfig::default()
    };
    let rows = harness::run_random(&loaded.graph, &args.fractions, &cfg)?;
    write_outputs(&rows, &args.out, args.summary.as_deref())
}

fn cmd_scaling(args: ScalingArgs) -> Result<(), CliError> {
    check_fractions(&[args.fraction])?;
    let strategies = parse_strategies(&args.strategies)?;
    if args.threads.is_empty() || args.threads.contains(&0) {
        return Err(CliError::Validation(
            "--threads needs a list of positive thread counts".to_string(),
        ));
    }
    check_plan(args.preload, args.batches)?;
    let opts = args.solver.options()?;
    let loaded = load_temporal_input(&args.input)?;
    let cfg = ExperimentConfig {
        graph_name: graph_name(&args.input),
        strategies,
        seed: args.seed,
        num_batches: args.batches,
        preload: args.preload,
        ref_every: args.ref_every,
        opts,
        ..ExperimentConfig::default()
    };
    let rows = harness::run_scaling(&loaded.stream, args.fraction, &args.threads, &cfg)?;
    if rows.iter().any(|r| r.truncated) {
        eprintln!("warning: stream exhausted before the requested batches; plan truncated");
    }
    write_outputs(&rows, &args.out, args.summary.as_deref())
}

fn cmd_ranks(args: RanksArgs) -> Result<(), CliError> {
    let strategy = Strategy::from_str(&args.strategy).map_err(CliError::Validation)?;
    let threads = resolve_threads(args.threads)?;
    check_plan(args.preload, 1)?;
    let opts = args.solver.options()?;
    let format = match args.format.as_deref() {
        Some("edges") => Some(GraphFormat::EdgeList),
        Some("mtx") => Some(GraphFormat::MatrixMarket),
        Some("temporal") => Some(GraphFormat::TemporalEdgeList),
        Some(other) => return Err(CliError::Validation(format!("unknown format '{other}'"))),
        None => None,
    };
    let cfg = ExperimentConfig {
        graph_name: graph_name(&args.input),
        threads,
        seed: args.seed,
        preload: args.preload,
        opts,
        ..ExperimentConfig::default()
    };

    // temporal input replays a preload plus one final batch; static input
    // supports the batch-free strategies only
    let treat_as_temporal = match format {
        Some(GraphFormat::TemporalEdgeList) => true,
        Some(_) => false,
        None => io::load_temporal(&args.input).is_ok(),
    };
    let (ids, ranks) = if treat_as_temporal {
        let loaded = load_temporal_input(&args.input)?;
        let ranks = harness::run_ranks_temporal(&loaded.stream, strategy, &cfg)?;
        (loaded.original_ids, ranks)
    } else {
        let loaded = load_static_input(&args.input, args.format.as_deref(), args.undirected)?;
        let ranks = harness::run_ranks_static(&loaded.graph, strategy, &cfg).ok_or_else(|| {
            CliError::Validation(format!(
                "strategy '{strategy}' needs a temporal input (batch updates); \
                 use static or nd for static datasets"
            ))
        })?;
        (loaded.original_ids, ranks)
    };
    io::write_ranks_tsv(&args.out, &ids, &ranks)?;
    println!("wrote {} ranks to {}", ranks.len(), args.out.display());
    Ok(())
}
