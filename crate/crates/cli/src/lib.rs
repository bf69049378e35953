//! Command-line front end: TOML configs in, CSV/JSON plot data out.

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::{Artifact, CommandOutput};
pub use config::{LoadedConfig, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rotcost", version, about = "Error and cost models for small-angle rotation gates")]
pub struct Cli {
    /// TOML run configuration; shipped defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for Monte-Carlo checks (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; CSV goes to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// RUS factor and error rate over angle, threshold, k and p_m.
    AlphaSweep,
    /// Error rate against expected clocks, with a synthesis-only comparator.
    Tradeoff,
    /// Feasible (N_T, N_R) boundaries of the four architectures.
    Bound,
    /// TE-PAI resource estimates.
    Tepai,
    /// Oracle and Monte-Carlo consistency checks.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AlphaSweep => "alpha-sweep",
            Command::Tradeoff => "tradeoff",
            Command::Bound => "bound",
            Command::Tepai => "tepai",
            Command::Verify => "verify",
        }
    }
}

/// Runs one command on a loaded config.
pub fn execute(command: Command, cfg: &LoadedConfig, seed: Option<u64>) -> Result<CommandOutput, CliError> {
    match command {
        Command::AlphaSweep => commands::alpha_sweep(cfg),
        Command::Tradeoff => commands::tradeoff(cfg),
        Command::Bound => commands::bound(cfg),
        Command::Tepai => commands::tepai(cfg),
        Command::Verify => {
            let seed = seed.or(cfg.config.seed).unwrap_or(commands::DEFAULT_SEED);
            commands::verify(cfg, seed)
        }
    }
}

fn write_artifacts(output: &CommandOutput, dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in &output.artifacts {
                std::fs::write(dir.join(&a.name), &a.contents)?;
            }
            if let Some(r) = &output.report {
                print!("{r}");
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match &output.report {
                Some(r) => stdout.write_all(r.as_bytes())?,
                None => {
                    if let Some(a) = output.artifacts.iter().find(|a| a.name.ends_with(".csv")) {
                        stdout.write_all(a.contents.as_bytes())?;
                    }
                }
            }
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run_inner(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => LoadedConfig::load(path)?,
        None => LoadedConfig::default(),
    };
    if cli.threads == Some(0) {
        return Err(CliError::config("--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))?;
    let output = pool.install(|| execute(cli.command, &cfg, cli.seed))?;
    let dir = cli.out.clone().or_else(|| cfg.config.output.dir.clone());
    write_artifacts(&output, dir.as_deref())?;
    match output.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_inner(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("rotcost {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
