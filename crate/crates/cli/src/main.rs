//! `gtasep` command-line driver.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Kind, Table};
use error::{CliError, Result};
use output::{Format, Output};

#[derive(Parser)]
#[command(name = "gtasep", version, about = "Generalized TASEP: simulation, exact results, cumulants and asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// `KEY=VALUE` override applied after the config file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo ensemble on the ring.
    Simulate(Common),
    /// Exact Z, J, Delta and occupation laws over an (M, N) grid.
    Exact(Common),
    /// Exact cumulants and the parametric generating function.
    Bethe(Common),
    /// Thermodynamic-limit tables.
    Asymptotics {
        #[arg(value_enum)]
        table: Table,
        #[command(flatten)]
        common: Common,
    },
    /// Exact samples of the grand-canonical stationary measure.
    Sample(Common),
    /// Cross-validation suite; exits 1 if any check fails.
    Validate(Common),
}

fn run(cli: Cli) -> Result<()> {
    let (kind, common) = match cli.command {
        Command::Simulate(c) => (Kind::Simulate, c),
        Command::Exact(c) => (Kind::Exact, c),
        Command::Bethe(c) => (Kind::Bethe, c),
        Command::Asymptotics { table, common } => (Kind::Asymptotics(table), common),
        Command::Sample(c) => (Kind::Sample, c),
        Command::Validate(c) => (Kind::Validate, c),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads {n}: {e}")))?;
    }
    let mut cfg = config::resolve(common.config.as_ref(), &common.set)?;
    if let Some(s) = common.seed {
        cfg.set(&format!("seed={s}"))?;
    }
    let job = commands::build(&kind, &mut cfg)?;
    cfg.check_unused()?;
    let mut out = Output::new(&common.out, common.format)?;
    let result = job.run(&mut out);
    // a failed validation still leaves its report and metadata behind
    if result.is_ok() || matches!(result, Err(CliError::Validation(_))) {
        out.finish(&kind.name(), job.seed(), &cfg)?;
    }
    result
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
