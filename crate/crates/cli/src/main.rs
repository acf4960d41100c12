use std::path::PathBuf;
use std::process::ExitCode;

use ab_cli::{commands, resolve_workers, CliError, Context, ExperimentConfig, Mode, WORKERS_ENV};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ab-sim", version, about = "Aharonov-Bohm phase and fringe experiments")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Concurrent sweep entries; overrides the environment and the config.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classical,
    Quantum,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Classical => Mode::Classical,
            ModeArg::Quantum => Mode::Quantum,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Phase accumulated around the configured loop or path pair.
    PhaseLoop,
    /// Screen intensity for one mode.
    Fringes {
        #[arg(long, value_enum, default_value = "classical")]
        mode: ModeArg,
        /// Also write the final |psi|^2 (quantum only).
        #[arg(long)]
        snapshot: bool,
    },
    /// Compare observables with and without the configured gauge.
    GaugeCheck {
        /// Include the lattice evolution check.
        #[arg(long)]
        quantum: bool,
    },
    /// Fringe shift of result dir A relative to result dir B.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Run the configured flux sweep.
    Sweep,
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    let config = ExperimentConfig::load(path)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let env = std::env::var(WORKERS_ENV).ok();
    let workers = resolve_workers(cli.workers, env.as_deref(), config.output.workers)?;
    Ok(Context {
        config,
        out_dir,
        workers,
        quiet: cli.quiet,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Compare { a, b, mode } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            commands::compare(a, b, mode.map(Mode::from), &out, cli.quiet).map(|_| ())
        }
        Command::PhaseLoop => commands::phase_loop(&context(cli)?).map(|_| ()),
        Command::Fringes { mode, snapshot } => {
            commands::fringes(&context(cli)?, (*mode).into(), *snapshot).map(|_| ())
        }
        Command::GaugeCheck { quantum } => commands::gauge_check(&context(cli)?, *quantum).map(|_| ()),
        Command::Sweep => commands::sweep(&context(cli)?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ab-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
