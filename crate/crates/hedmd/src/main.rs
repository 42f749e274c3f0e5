use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hedmd::config::{ExperimentConfig, Mode};
use hedmd::experiments::{generate_ensemble, run};
use hedmd::{compare, emit_report, ensemble_io, Error};

#[derive(Parser)]
#[command(
    name = "hedmd",
    version,
    about = "Koopman generator approximation from partially sampled states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multirate EDMD with ideal and LCM baselines
    Multirate(Common),
    /// Single-state EDMD with the ideal baseline and noise floor
    SingleState(Common),
    /// Simulate the training ensemble and export it as CSV
    Simulate(Common),
    /// Run the configured experiment over consecutive seeds
    Compare {
        #[command(flatten)]
        common: Common,
        /// Number of seeds, starting at the configured seed
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory in the config
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, PathBuf), Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
            .ok_or_else(|| {
                Error::Config("no output directory: pass --out or set output_dir".into())
            })?;
        Ok((cfg, out))
    }
}

fn stage_of(e: &Error) -> &str {
    match e {
        Error::Stage { stage, .. } | Error::Failed { stage, .. } => stage,
        Error::Config(_) | Error::Json { .. } => "config",
        Error::Io { .. } | Error::Parse { .. } => "io",
    }
}

fn experiment(common: &Common, mode: Mode) -> Result<(), Error> {
    let (cfg, out) = common.load()?;
    if cfg.mode != mode {
        return Err(Error::Config(format!(
            "config mode is {:?}, subcommand expects {mode:?}",
            cfg.mode
        )));
    }
    let report = run(&cfg)?;
    emit_report(&report, &out)?;
    match report.first_error() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn simulate(common: &Common) -> Result<(), Error> {
    let (cfg, out) = common.load()?;
    let records = generate_ensemble(&cfg.system.field()?, &cfg, None)?;
    ensemble_io::write_ensemble(&out, &records)
}

fn sweep(common: &Common, count: u64) -> Result<(), Error> {
    let (cfg, out) = common.load()?;
    let seeds: Vec<u64> = (cfg.seed..cfg.seed.saturating_add(count)).collect();
    let reports = compare::sweep(&cfg, &seeds)?;
    for r in &reports {
        emit_report(r, &out.join(format!("seed_{}", r.seed)))?;
    }
    compare::emit_compare(&reports, &out)?;
    match reports.iter().find_map(|r| r.first_error()) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Multirate(c) => experiment(c, Mode::Multirate),
        Command::SingleState(c) => experiment(c, Mode::SingleState),
        Command::Simulate(c) => simulate(c),
        Command::Compare { common, seeds } => sweep(common, *seeds),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", stage_of(&e));
            ExitCode::FAILURE
        }
    }
}
