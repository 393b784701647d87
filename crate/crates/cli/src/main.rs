//! `mlckpt`: evaluate, optimize and simulate multi-level checkpointing policies.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlckpt::model::IntervalRate;

use config::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad config or arguments; exit 2.
    Invalid(String),
    /// Divergence or non-convergence; exit 3.
    Numerical(String),
    /// Reading or writing files; exit 2.
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Numerical(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<mlckpt::Error> for CliError {
    fn from(e: mlckpt::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mlckpt", version, about = "Plan and check probabilistic multi-level checkpointing policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format; aligned text with 6 significant digits when omitted.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides every seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum RateArg {
    Aggregate,
    LowestLevel,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected utilization of the configured policy.
    Evaluate,
    /// Utilization-maximizing interval and level probabilities.
    Optimize,
    /// Closed-form approximate (T*, p1*) for two levels.
    Approx {
        /// Rate used in the interval approximation.
        #[arg(long, value_enum, default_value = "aggregate")]
        rate: RateArg,
    },
    /// Monte Carlo replay of the configured policy.
    Simulate {
        /// Write every event as JSON lines to this file.
        #[arg(long, value_name = "PATH")]
        event_log: Option<PathBuf>,
    },
    /// Utilization over the configured sweep.
    Sweep {
        /// Also simulate each point of a one-dimensional sweep.
        #[arg(long)]
        simulate: bool,
    },
    /// Optimum when only the first k levels plus the top level are used.
    Compare,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.common.config.as_ref().ok_or_else(|| CliError::Invalid("--config <PATH> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg = config::RunConfig::parse(&text)?;
    let format = cli.common.format.or(cfg.output.as_ref().and_then(|o| o.format)).unwrap_or(Format::Human);
    let out = cli.common.out.clone().or_else(|| cfg.output.as_ref().and_then(|o| o.path.clone()));
    let seed = cli.common.seed;

    let rendered = match cli.command {
        Command::Evaluate => commands::evaluate(&cfg, format)?,
        Command::Optimize => commands::optimize(&cfg, format, seed)?,
        Command::Approx { rate } => {
            let rate = match rate {
                RateArg::Aggregate => IntervalRate::Aggregate,
                RateArg::LowestLevel => IntervalRate::LowestLevel,
            };
            commands::approx(&cfg, format, rate)?
        }
        Command::Simulate { event_log } => commands::simulate(&cfg, format, seed, event_log.as_deref())?,
        Command::Sweep { simulate } => commands::sweep(&cfg, format, seed, simulate)?,
        Command::Compare => commands::compare(&cfg, format, seed)?,
    };
    match out {
        Some(path) => std::fs::write(&path, rendered).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
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
