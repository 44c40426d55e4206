//! Experiment configuration, deterministic batch execution and report
//! serialisation.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::meanfield::{
    EquilibriumPoint, FlowOptions, FlowTrajectory, MeanFieldError, MeanFieldModel, StabilityReport,
};
use crate::reinforce::{ClassRReport, ReinforcementSpec};
use crate::schedule::{ConditionReport, ScheduleFamily, ScheduleSpec, Verdict};
use crate::urn::{
    self, RunOptions, RunSummary, SeedProvenance, Snapshot, TrajectoryMode, UrnError,
};

pub const SCHEMA: &str = "polya-urn/1";
/// Minimum horizon used when checking the schedule conditions.
pub const MIN_CONDITION_HORIZON: u64 = 100;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("replication {replication} (master seed {master_seed}) failed: {source}")]
    Replication {
        master_seed: u64,
        replication: u64,
        #[source]
        source: UrnError,
    },
    #[error(transparent)]
    MeanField(#[from] MeanFieldError),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// True for errors caused by the configuration rather than the run.
    pub fn is_config_error(&self) -> bool {
        matches!(self, HarnessError::Config { .. } | HarnessError::Json(_))
    }
}

fn config_error(field: impl Into<String>, message: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Number of Dirichlet(1, ..., 1) starting points for flows.
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            starts: default_starts(),
            dt: default_dt(),
            horizon: default_horizon(),
        }
    }
}

fn default_starts() -> usize {
    10
}
fn default_dt() -> f64 {
    crate::meanfield::DEFAULT_DT
}
fn default_horizon() -> f64 {
    crate::meanfield::DEFAULT_HORIZON
}
fn default_snapshots() -> usize {
    urn::DEFAULT_SNAPSHOTS
}
fn default_epsilon() -> f64 {
    urn::DEFAULT_DOMINANCE_EPSILON
}
fn default_window() -> u64 {
    urn::DEFAULT_FIXATION_WINDOW
}
fn default_replications() -> u64 {
    1
}
fn default_schema() -> String {
    SCHEMA.to_string()
}

/// One JSON document describing an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub d: usize,
    pub initial: Vec<f64>,
    pub reinforcement: ReinforcementSpec,
    pub schedule: ScheduleFamily,
    pub steps: u64,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    /// Trajectory snapshots per replication; 0 disables trajectories.
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    #[serde(default = "default_epsilon")]
    pub dominance_epsilon: f64,
    #[serde(default = "default_window")]
    pub fixation_window: u64,
    /// Step `eta` after which martingale increments are accumulated.
    #[serde(default)]
    pub martingale_start: u64,
    #[serde(default)]
    pub allow_dead_colors: bool,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| config_error("<document>", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(io_error(path))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema != SCHEMA {
            return Err(config_error(
                "schema",
                format!("expected {SCHEMA:?}, got {:?}", self.schema),
            ));
        }
        if self.d < 2 {
            return Err(config_error("d", "need at least two colours"));
        }
        if self.initial.len() != self.d {
            return Err(config_error(
                "initial",
                format!("expected {} weights, got {}", self.d, self.initial.len()),
            ));
        }
        for (i, &w) in self.initial.iter().enumerate() {
            if !w.is_finite() || w < 0.0 || (w == 0.0 && !self.allow_dead_colors) {
                return Err(config_error(
                    format!("initial[{i}]"),
                    format!(
                        "weight {w} must be positive (zero allowed only with allow_dead_colors)"
                    ),
                ));
            }
        }
        if self.initial.iter().all(|&w| w == 0.0) {
            return Err(config_error("initial", "all weights are zero"));
        }
        self.schedule
            .validate()
            .map_err(|e| config_error("schedule", e.to_string()))?;
        if self.replications == 0 {
            return Err(config_error("replications", "must be >= 1"));
        }
        if !(self.dominance_epsilon > 0.0 && self.dominance_epsilon < 1.0) {
            return Err(config_error("dominance_epsilon", "must lie in (0, 1)"));
        }
        if self.fixation_window == 0 {
            return Err(config_error("fixation_window", "must be >= 1"));
        }
        if self.analysis.starts == 0 {
            return Err(config_error("analysis.starts", "must be >= 1"));
        }
        if !(self.analysis.dt > 0.0 && self.analysis.dt.is_finite()) {
            return Err(config_error("analysis.dt", "must be positive"));
        }
        if !(self.analysis.horizon >= 0.0 && self.analysis.horizon.is_finite()) {
            return Err(config_error("analysis.horizon", "must be non-negative"));
        }
        Ok(())
    }

    pub fn tau0(&self) -> f64 {
        self.initial.iter().sum()
    }

    pub fn schedule_spec(&self) -> Result<ScheduleSpec, HarnessError> {
        ScheduleSpec::new(self.schedule.clone(), self.tau0())
            .map_err(|e| config_error("schedule", e.to_string()))
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            dominance_epsilon: self.dominance_epsilon,
            fixation_window: self.fixation_window,
            martingale_start: self.martingale_start,
            trajectory: if self.snapshots == 0 {
                TrajectoryMode::None
            } else {
                TrajectoryMode::Thinned(self.snapshots)
            },
            allow_dead_colours: self.allow_dead_colors,
        }
    }
}

/// Validation stamps: whether the hypotheses of the dominance and fixation
/// results hold for this configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisStamp {
    pub class_r: ClassRReport,
    pub conditions: Option<ConditionReport>,
    pub hypotheses_hold: bool,
    pub warnings: Vec<String>,
}

/// Checks the reinforcement function and the schedule without simulating.
pub fn stamp(config: &ExperimentConfig) -> Result<HypothesisStamp, HarnessError> {
    let class_r = config.reinforcement.validate_class_r();
    let mut warnings = Vec::new();
    if !class_r.cond_a.passed {
        warnings.push(
            "reinforcement function violates condition (A): not monotone or wrong endpoint values"
                .into(),
        );
    }
    if !class_r.cond_b.passed {
        warnings
            .push("reinforcement function violates condition (B): derivative not finite".into());
    }
    if !class_r.cond_c.passed {
        let alpha = class_r
            .cond_c
            .alpha_inf
            .map_or_else(|| "unavailable".to_string(), |a| a.to_string());
        warnings.push(format!(
            "reinforcement function violates condition (C): alpha_inf = {alpha} <= 1"
        ));
    }
    let schedule = config.schedule_spec()?;
    let horizon = config.steps.max(MIN_CONDITION_HORIZON);
    let conditions = match schedule.check_conditions(horizon) {
        Ok(report) => {
            match report.cond_i_verdict {
                Verdict::Diverges => {}
                Verdict::Converges => warnings
                    .push("schedule condition (i) fails: sum sigma_n/tau_n converges".into()),
                Verdict::Inconclusive => warnings
                    .push("schedule condition (i) could not be decided at this horizon".into()),
            }
            match report.cond_ii_verdict {
                Verdict::Converges => {}
                Verdict::Diverges => warnings
                    .push("schedule condition (ii) fails: sum (sigma_n/tau_n)^2 diverges".into()),
                Verdict::Inconclusive => warnings
                    .push("schedule condition (ii) could not be decided at this horizon".into()),
            }
            Some(report)
        }
        Err(e) => {
            warnings.push(format!("schedule conditions could not be evaluated: {e}"));
            None
        }
    };
    let hypotheses_hold =
        class_r.in_class() && conditions.as_ref().is_some_and(|c| c.hypotheses_hold());
    Ok(HypothesisStamp {
        class_r,
        conditions,
        hypotheses_hold,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: u64,
    pub median: u64,
    pub p90: u64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for an empty sample.
    pub fn of(values: &[u64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let rank = |q: f64| {
            let idx = (q * sorted.len() as f64).ceil() as usize;
            sorted[idx.clamp(1, sorted.len()) - 1]
        };
        Some(Self {
            min: sorted[0],
            median: rank(0.5),
            p90: rank(0.9),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleStats {
    pub mean_sq_norm: f64,
    pub max_sq_norm: f64,
    pub standard_error: f64,
    /// `d / tau_eta`.
    pub bound: f64,
}

/// Statistics derived from the per-run summaries alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub replications: u64,
    /// Fraction of runs dominated by each colour.
    pub dominance_frequency: Vec<f64>,
    pub dominance_fraction: f64,
    pub fixation_fraction: f64,
    pub fixation_onset: Option<Quantiles>,
    /// Fixated runs that the dominance detector did not flag.
    pub fixated_not_dominated: u64,
    pub martingale: MartingaleStats,
}

impl Aggregate {
    pub fn from_runs(d: usize, bound: f64, runs: &[RunSummary]) -> Self {
        let r = runs.len() as f64;
        let mut per_colour = vec![0u64; d];
        let mut onsets = Vec::new();
        let mut fixated_not_dominated = 0;
        for run in runs {
            if let Some(c) = run.dominant_colour {
                per_colour[c] += 1;
            }
            if let Some(fix) = run.fixation {
                onsets.push(fix.onset);
                if run.dominant_colour != Some(fix.colour) {
                    fixated_not_dominated += 1;
                }
            }
        }
        let norms: Vec<f64> = runs.iter().map(|s| s.martingale_sq_norm).collect();
        let mean = norms.iter().sum::<f64>() / r;
        let var = if runs.len() > 1 {
            norms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        Self {
            replications: runs.len() as u64,
            dominance_frequency: per_colour.iter().map(|&c| c as f64 / r).collect(),
            dominance_fraction: per_colour.iter().sum::<u64>() as f64 / r,
            fixation_fraction: onsets.len() as f64 / r,
            fixation_onset: Quantiles::of(&onsets),
            fixated_not_dominated,
            martingale: MartingaleStats {
                mean_sq_norm: mean,
                max_sq_norm: norms.iter().copied().fold(0.0, f64::max),
                standard_error: (var / r).sqrt(),
                bound,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub schema: String,
    pub config: ExperimentConfig,
    pub stamp: HypothesisStamp,
    pub aggregate: Aggregate,
    pub runs: Vec<RunSummary>,
}

impl BatchReport {
    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub report: BatchReport,
    /// Thinned trajectories, indexed by replication.
    pub trajectories: Vec<Vec<Snapshot>>,
}

/// Runs every replication on the current rayon pool.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchOutput, HarnessError> {
    config.validate()?;
    let stamp = stamp(config)?;
    let schedule = config.schedule_spec()?;
    let options = config.run_options();
    let f = &config.reinforcement;

    let results: Vec<Result<(RunSummary, Vec<Snapshot>), HarnessError>> = (0..config.replications)
        .into_par_iter()
        .map(|replication| {
            let seed = SeedProvenance {
                master_seed: config.seed,
                replication,
            };
            let mut rng = urn::replication_rng(config.seed, replication);
            urn::run(
                &config.initial,
                f,
                &schedule,
                config.steps,
                &options,
                seed,
                &mut rng,
            )
            .map(|out| (out.summary, out.snapshots))
            .map_err(|source| HarnessError::Replication {
                master_seed: config.seed,
                replication,
                source,
            })
        })
        .collect();

    let mut runs = Vec::with_capacity(results.len());
    let mut trajectories = Vec::with_capacity(results.len());
    for result in results {
        let (summary, snaps) = result?;
        runs.push(summary);
        trajectories.push(snaps);
    }
    runs.sort_by_key(|s| s.seed.replication);

    let tau_eta = schedule
        .tau(config.martingale_start)
        .map_err(|e| config_error("martingale_start", e.to_string()))?;
    let aggregate = Aggregate::from_runs(config.d, config.d as f64 / tau_eta, &runs);
    Ok(BatchOutput {
        report: BatchReport {
            schema: SCHEMA.to_string(),
            config: config.clone(),
            stamp,
            aggregate,
            runs,
        },
        trajectories,
    })
}

/// [`run_batch`] on a dedicated pool with `threads` workers.
pub fn run_batch_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<BatchOutput, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::ThreadPool(e.to_string()))?;
    pool.install(|| run_batch(config))
}

/// Stability analysis of one equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumAnalysis {
    pub equilibrium: EquilibriumPoint,
    pub stability: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub start: Vec<f64>,
    pub trajectory: FlowTrajectory,
    pub lyapunov: Vec<f64>,
    pub nearest_equilibrium: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub equilibria: Vec<EquilibriumAnalysis>,
    pub flows: Vec<FlowRecord>,
}

/// Point drawn uniformly from the simplex.
pub fn dirichlet_start<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut y: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = y.iter().sum();
    y.iter_mut().for_each(|v| *v /= s);
    y
}

/// Equilibria with stability reports, plus flows from seeded random starts.
pub fn analyze(config: &ExperimentConfig) -> Result<Analysis, HarnessError> {
    config.validate()?;
    let model = MeanFieldModel::new(config.d, config.reinforcement.clone())?;
    let points = model.equilibria()?;
    let equilibria = points
        .iter()
        .map(|e| {
            Ok(EquilibriumAnalysis {
                stability: model.jacobian(&e.coordinates)?,
                equilibrium: e.clone(),
            })
        })
        .collect::<Result<Vec<_>, MeanFieldError>>()?;

    let mut rng = urn::replication_rng(config.seed, u64::MAX);
    let starts: Vec<Vec<f64>> = (0..config.analysis.starts)
        .map(|_| dirichlet_start(config.d, &mut rng))
        .collect();
    let options = FlowOptions {
        dt: config.analysis.dt,
        horizon: config.analysis.horizon,
        ..FlowOptions::default()
    };
    let flows = starts
        .into_par_iter()
        .map(|start| {
            let trajectory = model.flow(&start, &options)?;
            let lyapunov = trajectory
                .points
                .iter()
                .map(|y| model.lyapunov(y))
                .collect::<Result<Vec<_>, _>>()?;
            let (nearest_equilibrium, distance) = model
                .nearest_equilibrium(trajectory.last(), &points)
                .expect("equilibria are never empty");
            Ok(FlowRecord {
                start,
                trajectory,
                lyapunov,
                nearest_equilibrium,
                distance,
            })
        })
        .collect::<Result<Vec<_>, MeanFieldError>>()?;
    Ok(Analysis { equilibria, flows })
}

/// Writes `run_id, step, tau, theta_1..theta_d`.
pub fn write_trajectories_csv<W: Write>(
    out: W,
    d: usize,
    trajectories: &[Vec<Snapshot>],
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["run_id".to_string(), "step".into(), "tau".into()];
    header.extend((1..=d).map(|i| format!("theta_{i}")));
    w.write_record(&header)?;
    for (run_id, snaps) in trajectories.iter().enumerate() {
        for s in snaps {
            let mut row = vec![run_id.to_string(), s.step.to_string(), s.tau.to_string()];
            row.extend(s.theta.iter().map(|t| t.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

/// Writes one row per replication.
pub fn write_runs_csv<W: Write>(out: W, d: usize, runs: &[RunSummary]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "run_id",
        "master_seed",
        "steps",
        "tau",
        "dominant_colour",
        "dominance_margin",
        "fixation_colour",
        "fixation_onset",
        "martingale_sq_norm",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((1..=d).map(|i| format!("theta_{i}")));
    w.write_record(&header)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for run in runs {
        let mut row = vec![
            run.seed.replication.to_string(),
            run.seed.master_seed.to_string(),
            run.steps.to_string(),
            run.final_tau.to_string(),
            opt(run.dominant_colour.map(|c| c.to_string())),
            run.dominance_margin.to_string(),
            opt(run.fixation.map(|f| f.colour.to_string())),
            opt(run.fixation.map(|f| f.onset.to_string())),
            run.martingale_sq_norm.to_string(),
        ];
        row.extend(run.final_theta.iter().map(|t| t.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

/// Writes `t, y_1..y_d, F` for one flow.
pub fn write_flow_csv<W: Write>(out: W, flow: &FlowRecord) -> Result<(), HarnessError> {
    let d = flow.start.len();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("y_{i}")));
    header.push("F".into());
    w.write_record(&header)?;
    for ((t, y), f) in flow
        .trajectory
        .times
        .iter()
        .zip(&flow.trajectory.points)
        .zip(&flow.lyapunov)
    {
        let mut row = vec![t.to_string()];
        row.extend(y.iter().map(|v| v.to_string()));
        row.push(f.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| HarnessError::Csv(e.into()))?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_error(parent))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_error(path))?))
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes()).map_err(io_error(path))?;
    out.flush().map_err(io_error(path))
}

/// Writes `report.json`, plus `runs.csv` and `trajectories.csv` in CSV mode.
/// Returns the files written.
pub fn write_batch(
    dir: &Path,
    format: OutputFormat,
    output: &BatchOutput,
) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();
    let report_path = dir.join("report.json");
    write_text(&report_path, &output.report.to_json()?)?;
    written.push(report_path);
    if format == OutputFormat::Csv {
        let d = output.report.config.d;
        let runs_path = dir.join("runs.csv");
        write_runs_csv(create(&runs_path)?, d, &output.report.runs)?;
        written.push(runs_path);
        let traj_path = dir.join("trajectories.csv");
        write_trajectories_csv(create(&traj_path)?, d, &output.trajectories)?;
        written.push(traj_path);
    }
    Ok(written)
}

/// Writes `equilibria.json` and one `flows/flow_NNN.csv` per flow.
pub fn write_analysis(dir: &Path, analysis: &Analysis) -> Result<Vec<PathBuf>, HarnessError> {
    let eq_path = dir.join("equilibria.json");
    write_text(
        &eq_path,
        &serde_json::to_string_pretty(&analysis.equilibria)?,
    )?;
    let mut written = vec![eq_path];
    for (i, flow) in analysis.flows.iter().enumerate() {
        let path = dir.join("flows").join(format!("flow_{i:03}.csv"));
        write_flow_csv(create(&path)?, flow)?;
        written.push(path);
    }
    Ok(written)
}
