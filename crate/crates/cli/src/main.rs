mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{CliError, Context};
use std::path::PathBuf;
use std::process::ExitCode;
use weyl_scatter::validation::{Fault, Level};

/// Scattering by curves carrying Dirichlet, Neumann, Robin, δ and δ′
/// conditions, computed from boundary integral equations.
#[derive(Parser)]
#[command(name = "weyl-scatter", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `threads` in the config).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scattering amplitude on an M×M direction grid.
    Farfield,
    /// On-shell scattering matrix and its unitarity residual.
    Smatrix,
    /// Generalized eigenfunction at points off the curve.
    Field,
    /// Perturbed resolvent kernel across an ε-sweep and its limit.
    Resolvent,
    /// Runs the check suite; exits 1 if any check fails.
    Validate {
        #[arg(value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    FarFieldSign,
}

fn init_threads(n: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Command::Validate { level, inject_fault } = cli.command {
        init_threads(cli.threads)?;
        let level = match level {
            LevelArg::Quick => Level::Quick,
            LevelArg::Full => Level::Full,
        };
        let fault = match inject_fault {
            Some(FaultArg::FarFieldSign) => Fault::FarFieldSign,
            None => Fault::None,
        };
        return commands::validate(level, fault, cli.out.as_deref(), cli.quiet);
    }
    let path = cli.config.ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let resolved = config::load(&path).map_err(|e| CliError::Config(e.to_string()))?;
    init_threads(cli.threads.or(resolved.config.threads))?;
    let out = cli
        .out
        .or_else(|| resolved.config.output.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set `output`".into()))?;
    let ctx = Context { run: &resolved, out: &out, quiet: cli.quiet };
    match cli.command {
        Command::Farfield => commands::farfield(&ctx),
        Command::Smatrix => commands::smatrix(&ctx),
        Command::Field => commands::field(&ctx),
        Command::Resolvent => commands::resolvent(&ctx),
        Command::Validate { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("weyl-scatter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
