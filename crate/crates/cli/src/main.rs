use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfnoise::units::UnitMode;

mod commands;
mod config;
mod output;

use config::RunConfig;
use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<qfnoise::Error> for CliError {
    fn from(e: qfnoise::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(vec![e.to_string()])
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Units {
    Natural,
    Si,
}

/// Quantum Coulomb-fluctuation noise spectra, kinetic field-induced noise
/// and sample G-factors.
#[derive(Debug, Parser)]
#[command(name = "qfnoise", version)]
struct Cli {
    /// TOML file merged over the shipped defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    units: Option<Units>,
    /// Print the shipped default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and asymptotic spectrum over an omega grid (CSV).
    Spectrum,
    /// Monte Carlo G-factor of the sample (JSON).
    Gfactor {
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Delta K sweep over q0 / q_F with slope fits (CSV).
    Kinetic,
    /// Ensemble statistics of the summed spectrum (JSON).
    Ensemble {
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        electrons: Option<u64>,
    },
    /// Invariant checks with a pass/fail table (CSV).
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::defaults(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    if let Some(u) = cli.units {
        cfg.units.mode = match u {
            Units::Natural => UnitMode::Natural,
            Units::Si => UnitMode::Si,
        };
    }
    match &cli.command {
        Some(Command::Gfactor { samples: Some(n) }) => cfg.gfactor.samples = *n,
        Some(Command::Ensemble { trials, electrons }) => {
            if let Some(t) = trials {
                cfg.ensemble.trials = *t;
            }
            if let Some(n) = electrons {
                cfg.ensemble.n_electrons = *n;
            }
        }
        _ => {}
    }
    let errs = cfg.validate();
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Config(errs))
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if cli.print_defaults {
        print!("{}", config::DEFAULTS);
        return Ok(true);
    }
    let Some(command) = &cli.command else {
        return Err(CliError::Config(vec!["no subcommand given (see --help)".into()]));
    };
    let cfg = load(cli)?;
    let (report, default_format) = match command {
        Command::Spectrum => (commands::spectrum(&cfg)?, Format::Csv),
        Command::Gfactor { .. } => (commands::gfactor(&cfg)?, Format::Json),
        Command::Kinetic => (commands::kinetic(&cfg)?, Format::Csv),
        Command::Ensemble { .. } => (commands::ensemble(&cfg)?, Format::Json),
        Command::Validate => (commands::validate(&cfg)?, Format::Csv),
    };
    let text = report.render(cli.format.unwrap_or(default_format), &cfg);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
