//! Simulation and mean-field analysis of time-dependent Polya urns with
//! positive reinforcement.
//!
//! An urn holds `d` colours. At step `n+1` it draws `sigma_{n+1}` balls, each
//! of colour `j` with probability proportional to `f(theta_{n,j})`, where
//! `theta_n` is the vector of colour proportions, and adds them back. The
//! crate runs that recursion reproducibly at scale ([`urn`], [`harness`]),
//! certifies the assumptions on `f` and `sigma` ([`reinforce`], [`schedule`])
//! and studies the associated ODE `y' = h(y)` ([`meanfield`]).

pub mod harness;
pub mod meanfield;
mod quadrature;
pub mod reinforce;
pub mod schedule;
pub mod urn;

pub use harness::{
    analyze, run_batch, run_batch_with_threads, Aggregate, Analysis, BatchOutput, BatchReport,
    ExperimentConfig, HarnessError, HypothesisStamp, OutputFormat,
};
pub use meanfield::{
    EquilibriumKind, EquilibriumPoint, FlowOptions, FlowTrajectory, MeanFieldError, MeanFieldModel,
    Stability, StabilityReport,
};
pub use reinforce::{
    Boundary, ClassRReport, DerivativeMode, Family, ReinforceError, ReinforcementSpec,
};
pub use schedule::{
    ConditionReport, OnExhaust, ScheduleError, ScheduleFamily, ScheduleSpec, Verdict,
};
pub use urn::{
    detect_dominance, detect_fixation, replication_rng, selection_probabilities, step, DrawRecord,
    Fixation, RunOptions, RunOutput, RunSummary, SeedProvenance, Snapshot, TrajectoryMode,
    UrnError, UrnState,
};
