//! `polya`: simulate, analyse and validate Polya urn experiments.
//!
//! Exit codes: 0 on success, 1 on invalid input (bad flags or config),
//! 2 on runtime errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use polya::harness::{self, ExperimentConfig, HarnessError, OutputFormat};
use polya::{MeanFieldModel, ReinforcementSpec};

const OUT_DIR_ENV: &str = "POLYA_OUT_DIR";
const THREADS_ENV: &str = "POLYA_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "polya",
    version,
    about = "Time-dependent Polya urn simulator and analyser"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
struct Overrides {
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (falls back to the config, then $POLYA_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Monte Carlo batch described by a config.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Worker threads (defaults to $POLYA_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Equilibria, stability reports and mean-field flows.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check the reinforcement function and the schedule conditions.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the equilibria of the mean-field ODE for `d` colours.
    Equilibria {
        #[arg(long)]
        d: usize,
        /// Exponent of the power reinforcement `x^a` (the set does not depend
        /// on the choice of function within the class).
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_config_error() {
            Failure::Input(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::load(path).map_err(|e| match e {
        HarnessError::Io { .. } => Failure::Input(e.into()),
        other => Failure::from(other),
    })?;
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(out) = &overrides.out {
        config.output.dir = Some(out.clone());
    }
    if config.output.dir.is_none() {
        config.output.dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    }
    if let Some(format) = overrides.format {
        config.output.format = format.into();
    }
    Ok(config)
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map(Some)
            .with_context(|| format!("${THREADS_ENV} must be a positive integer, got {v:?}"))
            .map_err(Failure::Input),
        Err(_) => Ok(None),
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Runtime(e.into())),
        _ => Ok(()),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.into()))?;
    emit(&format!("{text}\n"))
}

fn simulate(config: ExperimentConfig, threads: Option<usize>) -> Result<(), Failure> {
    let output = match threads {
        Some(n) => harness::run_batch_with_threads(&config, n)?,
        None => harness::run_batch(&config)?,
    };
    for warning in &output.report.stamp.warnings {
        eprintln!("warning: {warning}");
    }
    match &config.output.dir {
        Some(dir) => {
            for path in harness::write_batch(dir, config.output.format, &output)? {
                eprintln!("wrote {}", path.display());
            }
            let agg = &output.report.aggregate;
            eprintln!(
                "dominance {:.4}  fixation {:.4}  mean |M_N|^2 {:.3e} (bound {:.3e})",
                agg.dominance_fraction,
                agg.fixation_fraction,
                agg.martingale.mean_sq_norm,
                agg.martingale.bound
            );
            Ok(())
        }
        None => print_json(&output.report),
    }
}

fn analyze(config: ExperimentConfig) -> Result<(), Failure> {
    let analysis = harness::analyze(&config)?;
    match &config.output.dir {
        Some(dir) => {
            let written = harness::write_analysis(dir, &analysis)?;
            eprintln!("wrote {} files under {}", written.len(), dir.display());
            Ok(())
        }
        None => print_json(&analysis.equilibria),
    }
}

fn validate(config: ExperimentConfig) -> Result<(), Failure> {
    let stamp = harness::stamp(&config)?;
    for warning in &stamp.warnings {
        eprintln!("warning: {warning}");
    }
    print_json(&stamp)
}

fn equilibria(d: usize, exponent: f64, format: Format) -> Result<(), Failure> {
    let f = ReinforcementSpec::power(exponent).map_err(|e| Failure::Input(e.into()))?;
    let model = MeanFieldModel::new(d, f).map_err(|e| Failure::Input(e.into()))?;
    let points = model.equilibria().map_err(|e| Failure::Input(e.into()))?;
    match format {
        Format::Json => print_json(&points),
        Format::Csv => {
            let header: Vec<String> = (1..=d).map(|i| format!("y_{i}")).collect();
            let mut text = format!("support_size,{}\n", header.join(","));
            for p in &points {
                let coords: Vec<String> = p.coordinates.iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("{},{}\n", p.support.len(), coords.join(",")));
            }
            emit(&text)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            config,
            overrides,
            threads: flag,
        } => {
            let threads = threads(flag)?;
            simulate(load(&config, &overrides)?, threads)
        }
        Command::Analyze { config, overrides } => analyze(load(&config, &overrides)?),
        Command::Validate { config, overrides } => validate(load(&config, &overrides)?),
        Command::Equilibria {
            d,
            exponent,
            format,
        } => equilibria(d, exponent, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
