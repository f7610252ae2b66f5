use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use szsim::{output, ExperimentConfig, OutputFormat, Scenario, SearchMode};

/// Graph-phased Szegedy walk experiments.
///
/// Thread count: SZSIM_THREADS (default: all cores).
#[derive(Parser)]
#[command(name = "szsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its record.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    scenario: Scenario,
    /// Number of nodes (search, classical-check).
    #[arg(long)]
    n: Option<usize>,
    /// Steps; double steps for search-complete.
    #[arg(long)]
    steps: Option<usize>,
    /// Comma-separated marked nodes (search-complete).
    #[arg(long, value_delimiter = ',')]
    marked: Vec<usize>,
    #[arg(long, value_enum, default_value_t = SearchMode::Apr)]
    mode: SearchMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent. A `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Graph or coin JSON (custom, classical-check).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated ascending sizes (scaling-bench).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Timings per size; the minimum is kept (scaling-bench).
    #[arg(long, default_value_t = szsim::config::DEFAULT_REPEATS)]
    repeats: usize,
    /// Starting node (classical-check, custom).
    #[arg(long, default_value_t = 0)]
    start: usize,
    /// Renormalize the state every K steps instead of only checking it.
    #[arg(long, value_name = "K")]
    renorm: Option<usize>,
}

impl From<RunArgs> for ExperimentConfig {
    fn from(a: RunArgs) -> Self {
        ExperimentConfig {
            scenario: a.scenario,
            steps: a.steps,
            n_nodes: a.n,
            marked: a.marked,
            mode: a.mode,
            seed: a.seed,
            sizes: a.sizes,
            repeats: a.repeats,
            start: a.start,
            input: a.input,
            renorm_every: a.renorm,
            out: a.out,
            format: a.format,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let Command::Run(args) = Cli::parse().command;
    let config = ExperimentConfig::from(args);
    let result = szsim::configure_threads()
        .and_then(|_| szsim::run(&config))
        .and_then(|record| output::write_record(&record, config.out.as_deref(), config.format));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("szsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
