use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planar_friction_cli::{commands, CliError, RunConfig, THREADS_ENV};

#[derive(Parser)]
#[command(name = "planar-friction", version, about = "Planar friction models: pre-compute, simulate, compare, benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-compute and cache the limit-surface table
    Precompute(Common),
    /// Run the configured scenario and write traces
    Simulate(Common),
    /// Compare candidate models against a fine distributed oracle
    Compare(Common),
    /// Measure rate-evaluation throughput
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (also capped by PLANAR_FRICTION_THREADS)
    #[arg(long)]
    threads: Option<usize>,
    /// Seed, overriding `seed`
    #[arg(long)]
    seed: Option<u64>,
}

fn setup(common: &Common) -> Result<RunConfig, CliError> {
    let env_cap = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?),
        Err(_) => None,
    };
    let threads = match (common.threads, env_cap) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("thread count must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(out) = &common.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Precompute(c) => commands::precompute(&setup(&c)?).map(drop),
        Command::Simulate(c) => commands::simulate(&setup(&c)?, &c.config).map(drop),
        Command::Compare(c) => commands::compare(&setup(&c)?).map(drop),
        Command::Bench(c) => commands::bench(&setup(&c)?).map(drop),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
