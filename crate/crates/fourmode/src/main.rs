use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fourmode::commands;
use fourmode::config::{ExperimentConfig, TableFormat};
use fourmode::{dataset_io, CliError, OUTPUT_ENV};

/// Monte Carlo and analysis tool for momentum-entangled atom pairs in a
/// two-particle Bragg interferometer.
///
/// Exit status: 0 success, 1 other failure, 2 configuration or usage error,
/// 3 insufficient statistics, 4 fit failure, 5 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "fourmode", version)]
struct Cli {
    /// TOML configuration file; defaults are used for missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shot count of the subcommand (per setting or scan point where applicable).
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Output root; each subcommand writes into its own subdirectory.
    #[arg(long, global = true, env = OUTPUT_ENV)]
    out: Option<PathBuf>,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<TableFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate and save a dataset.
    Simulate {
        /// Free expansion without Bragg pulses.
        #[arg(long)]
        no_optics: bool,
    },
    /// Pair correlation map and its projections.
    G2Map {
        /// Analyse a saved dataset instead of simulating one.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Joint detection probabilities, correlations and the reference-set zero level.
    JointProbs {
        /// Analyse a saved dataset instead of simulating one.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Scan of the splitter time across the closing time.
    HomScan,
    /// Analytic correlation versus analyser phase difference.
    PhaseScan,
    /// CHSH value, analytic and Monte Carlo.
    Bell,
    /// Tune the pair number per mode to the target occupation.
    CalibrateGain,
    /// Print the resolved configuration.
    Config,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.to_string_lossy().into_owned();
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(n) = cli.shots {
        let a = &mut cfg.analysis;
        match cli.command {
            Command::G2Map { .. } => a.g2_shots = n,
            Command::HomScan => a.hom_shots_per_point = n,
            Command::Bell => a.bell_shots_per_setting = n,
            Command::CalibrateGain => a.calibration_shots = n,
            _ => cfg.shots = n,
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli)?;
    let w = cli.workers;
    if w == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let out = match cli.command {
        Command::Simulate { no_optics } => commands::simulate::run(&cfg, !no_optics, w)?,
        Command::G2Map { dataset } => {
            let ds = dataset.as_deref().map(dataset_io::load).transpose()?;
            commands::g2::run(&cfg, ds, w)?
        }
        Command::JointProbs { dataset } => {
            let ds = dataset.as_deref().map(dataset_io::load).transpose()?;
            commands::joint::run(&cfg, ds, w)?
        }
        Command::HomScan => commands::hom::run(&cfg, w)?,
        Command::PhaseScan => commands::phase::run(&cfg)?,
        Command::Bell => commands::bell::run(&cfg, w)?,
        Command::CalibrateGain => commands::calibrate::run(&cfg, w)?,
        Command::Config => {
            print!("{}", cfg.to_toml_string());
            return Ok(());
        }
    };
    println!("{}", out.dir().display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
