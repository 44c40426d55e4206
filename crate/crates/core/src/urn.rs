//! The urn recursion itself.
//!
//! At step `n+1` the urn draws `sigma_{n+1}` balls i.i.d. with colour `j`
//! chosen with probability `f(theta_{n,j}) / sum_k f(theta_{n,k})`, and adds
//! one ball of each drawn colour. Given the past, the vector of drawn counts is
//! multinomial, which is how it is sampled here (colour by colour, as a chain
//! of conditional binomials).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reinforce::ReinforcementSpec;
use crate::schedule::{ScheduleError, ScheduleSpec, EXACT_INTEGER_LIMIT};

/// Default number of evenly spaced trajectory snapshots.
pub const DEFAULT_SNAPSHOTS: usize = 512;
pub const DEFAULT_DOMINANCE_EPSILON: f64 = 0.05;
pub const DEFAULT_FIXATION_WINDOW: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UrnError {
    #[error("an urn needs at least two colours, got {0}")]
    TooFewColours(usize),
    #[error("initial weight of colour {index} is {value}; every colour must start with positive weight (set allow_dead_colors to override)")]
    DeadColour { index: usize, value: f64 },
    #[error("initial weights must be finite, non-negative and not all zero: {0:?}")]
    BadInitial(Vec<f64>),
    #[error("all selection weights vanish at proportions {theta:?}")]
    NoSelectableColour { theta: Vec<f64> },
    #[error("total weight {0} exceeds the exact integer range of f64")]
    TotalOverflow(f64),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Independent, reproducible RNG stream for one replication.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrnState {
    counts: Vec<f64>,
    step: u64,
    total: f64,
}

impl UrnState {
    /// Starts an urn at step 0; every colour must have positive weight.
    pub fn new(counts: Vec<f64>) -> Result<Self, UrnError> {
        Self::with_policy(counts, false)
    }

    pub fn with_policy(counts: Vec<f64>, allow_dead_colours: bool) -> Result<Self, UrnError> {
        if counts.len() < 2 {
            return Err(UrnError::TooFewColours(counts.len()));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) || counts.iter().all(|c| *c == 0.0) {
            return Err(UrnError::BadInitial(counts));
        }
        if !allow_dead_colours {
            if let Some((index, &value)) = counts.iter().enumerate().find(|(_, c)| **c <= 0.0) {
                return Err(UrnError::DeadColour { index, value });
            }
        }
        let total = counts.iter().sum();
        if total > EXACT_INTEGER_LIMIT {
            return Err(UrnError::TotalOverflow(total));
        }
        Ok(Self {
            counts,
            step: 0,
            total,
        })
    }

    pub fn colours(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// `theta_n = U_n / tau_n`.
    pub fn proportions(&self) -> Vec<f64> {
        let mut theta = vec![0.0; self.counts.len()];
        self.proportions_into(&mut theta);
        theta
    }

    fn proportions_into(&self, out: &mut [f64]) {
        for (t, c) in out.iter_mut().zip(&self.counts) {
            *t = c / self.total;
        }
    }

    fn add(&mut self, drawn: &[u64], sigma: u64) -> Result<(), UrnError> {
        for (c, k) in self.counts.iter_mut().zip(drawn) {
            *c += *k as f64;
        }
        self.total += sigma as f64;
        self.step += 1;
        if self.total > EXACT_INTEGER_LIMIT {
            return Err(UrnError::TotalOverflow(self.total));
        }
        Ok(())
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    /// Index `n+1` of the step that produced this draw.
    pub step: u64,
    pub sigma: u64,
    pub drawn: Vec<u64>,
    /// Selection probabilities used for the draw.
    pub probs: Vec<f64>,
    /// `drawn - sigma * probs`.
    pub martingale_increment: Vec<f64>,
}

impl DrawRecord {
    fn empty(d: usize) -> Self {
        DrawRecord {
            step: 0,
            sigma: 0,
            drawn: vec![0; d],
            probs: vec![0.0; d],
            martingale_increment: vec![0.0; d],
        }
    }

    /// The colour that received every ball of this step, if any.
    pub fn sole_recipient(&self) -> Option<usize> {
        let mut hit = None;
        for (i, &k) in self.drawn.iter().enumerate() {
            if k > 0 {
                if hit.is_some() {
                    return None;
                }
                hit = Some(i);
            }
        }
        hit
    }
}

/// `f(theta_i) / sum_k f(theta_k)` for the urn's current proportions.
pub fn selection_probabilities(
    state: &UrnState,
    f: &ReinforcementSpec,
) -> Result<Vec<f64>, UrnError> {
    let theta = state.proportions();
    let mut probs = vec![0.0; theta.len()];
    probabilities_into(&theta, f, &mut probs)?;
    Ok(probs)
}

/// Normalised selection weights at proportions `theta`.
pub(crate) fn probabilities_into(
    theta: &[f64],
    f: &ReinforcementSpec,
    out: &mut [f64],
) -> Result<(), UrnError> {
    let mut norm = 0.0;
    for (p, &t) in out.iter_mut().zip(theta) {
        *p = f.eval_unchecked(t.clamp(0.0, 1.0));
        norm += *p;
    }
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(UrnError::NoSelectableColour {
            theta: theta.to_vec(),
        });
    }
    for p in out.iter_mut() {
        *p /= norm;
    }
    Ok(())
}

/// Multinomial(`n`, `probs`) via conditional binomials; `probs` must sum to 1.
pub fn sample_multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R, out: &mut [u64]) {
    out.iter_mut().for_each(|k| *k = 0);
    let mut remaining = n;
    let last = probs.len() - 1;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i == last {
            out[i] = remaining;
            break;
        }
        // Mass of the later colours, summed afresh so that zero-probability
        // colours can never receive a ball through rounding.
        let later: f64 = probs[i + 1..].iter().sum();
        let q = if later <= 0.0 {
            1.0
        } else {
            (p / (p + later)).clamp(0.0, 1.0)
        };
        let k = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else if remaining == 1 {
            u64::from(rng.random::<f64>() < q)
        } else {
            Binomial::new(remaining, q)
                .expect("q in (0, 1)")
                .sample(rng)
        };
        out[i] = k;
        remaining -= k;
    }
}

/// One step of the urn: returns the next state and the draw that produced it.
pub fn step<R: Rng + ?Sized>(
    state: &UrnState,
    f: &ReinforcementSpec,
    schedule: &ScheduleSpec,
    rng: &mut R,
) -> Result<(UrnState, DrawRecord), UrnError> {
    let mut next = state.clone();
    let mut theta = vec![0.0; state.colours()];
    let mut record = DrawRecord::empty(state.colours());
    advance(&mut next, f, schedule, rng, &mut theta, &mut record)?;
    Ok((next, record))
}

/// In-place step using caller-owned scratch buffers.
fn advance<R: Rng + ?Sized>(
    state: &mut UrnState,
    f: &ReinforcementSpec,
    schedule: &ScheduleSpec,
    rng: &mut R,
    theta: &mut [f64],
    record: &mut DrawRecord,
) -> Result<(), UrnError> {
    let n = state.step + 1;
    let sigma = schedule.sigma(n)?;
    state.proportions_into(theta);
    probabilities_into(theta, f, &mut record.probs)?;
    sample_multinomial(sigma, &record.probs, rng, &mut record.drawn);
    for ((dm, &k), &p) in record
        .martingale_increment
        .iter_mut()
        .zip(&record.drawn)
        .zip(&record.probs)
    {
        *dm = k as f64 - sigma as f64 * p;
    }
    record.step = n;
    record.sigma = sigma;
    state.add(&record.drawn, sigma)
}

/// Argmax of `theta` (lowest index on ties) when it is at least `1 - epsilon`.
pub fn detect_dominance(theta: &[f64], epsilon: f64) -> Option<usize> {
    let (best, &max) = theta
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, t)| {
            if *t > *acc.1 {
                (i, t)
            } else {
                acc
            }
        });
    (max >= 1.0 - epsilon).then_some(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixation {
    pub colour: usize,
    /// One past the last step at which another colour received a ball.
    pub onset: u64,
    pub window: u64,
}

/// Streaming fixation detector: tracks the current run of steps in which a
/// single colour received every ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixationTracker {
    colour: Option<usize>,
    onset: u64,
    last_step: u64,
}

impl FixationTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, record: &DrawRecord) {
        match record.sole_recipient() {
            Some(c) if self.colour == Some(c) => {}
            Some(c) => {
                self.colour = Some(c);
                self.onset = record.step;
            }
            None => {
                self.colour = None;
                self.onset = record.step + 1;
            }
        }
        self.last_step = record.step;
    }

    /// Fixation if the last `window` steps all went to one colour.
    pub fn verdict(&self, window: u64) -> Option<Fixation> {
        let colour = self.colour?;
        let streak = self.last_step + 1 - self.onset;
        (window >= 1 && self.last_step >= window && streak >= window).then_some(Fixation {
            colour,
            onset: self.onset,
            window,
        })
    }
}

/// Finite-horizon fixation proxy over a draw history.
pub fn detect_fixation(history: &[DrawRecord], window: u64) -> Option<Fixation> {
    let mut tracker = FixationTracker::new();
    history.iter().for_each(|r| tracker.observe(r));
    tracker.verdict(window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub replication: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: SeedProvenance,
    pub steps: u64,
    pub final_tau: f64,
    pub final_theta: Vec<f64>,
    pub dominant_colour: Option<usize>,
    /// `max_i theta_{N,i}`, in `[1/d, 1]`.
    pub dominance_margin: f64,
    pub fixation: Option<Fixation>,
    /// `|sum_{j=eta+1}^N dM_j / tau_j|^2`.
    pub martingale_sq_norm: f64,
    pub martingale_start: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryMode {
    None,
    /// Roughly this many evenly spaced snapshots, always including both ends.
    Thinned(usize),
    /// Every state and every draw.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub dominance_epsilon: f64,
    pub fixation_window: u64,
    pub martingale_start: u64,
    pub trajectory: TrajectoryMode,
    pub allow_dead_colours: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            dominance_epsilon: DEFAULT_DOMINANCE_EPSILON,
            fixation_window: DEFAULT_FIXATION_WINDOW,
            martingale_start: 0,
            trajectory: TrajectoryMode::Thinned(DEFAULT_SNAPSHOTS),
            allow_dead_colours: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: u64,
    pub tau: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub snapshots: Vec<Snapshot>,
    /// Present only for [`TrajectoryMode::Full`].
    pub draws: Option<Vec<DrawRecord>>,
}

fn snapshot_steps(steps: u64, count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    if count == 1 || steps == 0 {
        return vec![steps];
    }
    let mut out: Vec<u64> = (0..count)
        .map(|j| ((j as u128 * steps as u128) / (count as u128 - 1)) as u64)
        .collect();
    out.dedup();
    out
}

/// Runs `steps` steps from `initial` and summarises the outcome.
pub fn run<R: Rng + ?Sized>(
    initial: &[f64],
    f: &ReinforcementSpec,
    schedule: &ScheduleSpec,
    steps: u64,
    options: &RunOptions,
    seed: SeedProvenance,
    rng: &mut R,
) -> Result<RunOutput, UrnError> {
    let mut state = UrnState::with_policy(initial.to_vec(), options.allow_dead_colours)?;
    let d = state.colours();
    let mut theta = vec![0.0; d];
    let mut record = DrawRecord::empty(d);
    let mut tracker = FixationTracker::new();
    let mut martingale = vec![0.0; d];

    let keep = match options.trajectory {
        TrajectoryMode::None => Vec::new(),
        TrajectoryMode::Thinned(count) => snapshot_steps(steps, count),
        TrajectoryMode::Full => (0..=steps).collect(),
    };
    let mut next_keep = keep.iter().peekable();
    let mut snapshots = Vec::with_capacity(keep.len());
    let mut draws = matches!(options.trajectory, TrajectoryMode::Full).then(Vec::new);

    let mut take_snapshot = |state: &UrnState, snapshots: &mut Vec<Snapshot>| {
        if next_keep.peek() == Some(&&state.step) {
            next_keep.next();
            snapshots.push(Snapshot {
                step: state.step,
                tau: state.total,
                theta: state.proportions(),
            });
        }
    };
    take_snapshot(&state, &mut snapshots);

    for _ in 0..steps {
        advance(&mut state, f, schedule, rng, &mut theta, &mut record)?;
        tracker.observe(&record);
        if record.step > options.martingale_start {
            for (m, dm) in martingale.iter_mut().zip(&record.martingale_increment) {
                *m += dm / state.total;
            }
        }
        if let Some(history) = draws.as_mut() {
            history.push(record.clone());
        }
        take_snapshot(&state, &mut snapshots);
    }

    let final_theta = state.proportions();
    let dominance_margin = final_theta
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = RunSummary {
        seed,
        steps,
        final_tau: state.total,
        dominant_colour: detect_dominance(&final_theta, options.dominance_epsilon),
        dominance_margin,
        fixation: tracker.verdict(options.fixation_window),
        martingale_sq_norm: martingale.iter().map(|m| m * m).sum(),
        martingale_start: options.martingale_start,
        final_theta,
    };
    Ok(RunOutput {
        summary,
        snapshots,
        draws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::ScheduleFamily;

    fn square() -> ReinforcementSpec {
        ReinforcementSpec::power(2.0).unwrap()
    }

    fn unit_schedule(tau0: f64) -> ScheduleSpec {
        ScheduleSpec::new(ScheduleFamily::Constant { c: 1 }, tau0).unwrap()
    }

    fn seed(master_seed: u64) -> SeedProvenance {
        SeedProvenance {
            master_seed,
            replication: 0,
        }
    }

    #[test]
    fn selection_probability_examples() {
        let p =
            selection_probabilities(&UrnState::new(vec![1.0, 2.0]).unwrap(), &square()).unwrap();
        assert!((p[0] - 0.2).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);

        let pe = ReinforcementSpec::power_exp(0.1).unwrap();
        let p = selection_probabilities(&UrnState::new(vec![4.0, 4.0, 4.0]).unwrap(), &pe).unwrap();
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }

        let absorbed = UrnState::with_policy(vec![3.0, 0.0], true).unwrap();
        assert_eq!(
            selection_probabilities(&absorbed, &square()).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn vanishing_weights_name_the_state() {
        let f = ReinforcementSpec::tabulated(vec![[0.0, 0.0], [0.6, 0.0], [1.0, 1.0]]).unwrap();
        let state = UrnState::new(vec![1.0, 1.0]).unwrap();
        match selection_probabilities(&state, &f) {
            Err(UrnError::NoSelectableColour { theta }) => assert_eq!(theta, vec![0.5, 0.5]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn initial_composition_is_validated() {
        assert_eq!(
            UrnState::new(vec![1.0]).unwrap_err(),
            UrnError::TooFewColours(1)
        );
        assert!(matches!(
            UrnState::new(vec![1.0, 0.0]),
            Err(UrnError::DeadColour { index: 1, .. })
        ));
        assert!(UrnState::with_policy(vec![1.0, 0.0], true).is_ok());
        assert!(UrnState::with_policy(vec![0.0, 0.0], true).is_err());
        assert!(UrnState::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn martingale_increment_arithmetic() {
        // drawn (2, 2) with sigma 4 and probabilities (1/4, 3/4)
        let drawn = [2u64, 2];
        let probs = [0.25, 0.75];
        let dm: Vec<f64> = drawn
            .iter()
            .zip(probs)
            .map(|(&k, p)| k as f64 - 4.0 * p)
            .collect();
        assert_eq!(dm, vec![1.0, -1.0]);
    }

    #[test]
    fn absorbed_urn_stays_absorbed() {
        let state = UrnState::with_policy(vec![5.0, 0.0, 0.0], true).unwrap();
        let sched = ScheduleSpec::new(ScheduleFamily::Constant { c: 7 }, 5.0).unwrap();
        let mut rng = replication_rng(3, 0);
        let mut s = state;
        for _ in 0..100 {
            let (next, rec) = step(&s, &square(), &sched, &mut rng).unwrap();
            assert_eq!(rec.drawn, vec![7, 0, 0]);
            s = next;
        }
        assert_eq!(s.counts(), &[705.0, 0.0, 0.0]);
    }

    #[test]
    fn multinomial_mean_matches_within_four_standard_errors() {
        let probs = [0.2, 0.5, 0.3];
        let n = 10u64;
        let reps = 100_000;
        let mut rng = replication_rng(11, 0);
        let mut out = [0u64; 3];
        let mut sums = [0.0; 3];
        for _ in 0..reps {
            sample_multinomial(n, &probs, &mut rng, &mut out);
            assert_eq!(out.iter().sum::<u64>(), n);
            for i in 0..3 {
                sums[i] += out[i] as f64;
            }
        }
        for i in 0..3 {
            let mean = sums[i] / reps as f64;
            let se = (n as f64 * probs[i] * (1.0 - probs[i]) / reps as f64).sqrt();
            assert!(
                (mean - n as f64 * probs[i]).abs() < 4.0 * se,
                "colour {i}: {mean}"
            );
        }
    }

    #[test]
    fn step_increments_counts_and_total() {
        let state = UrnState::new(vec![1.0, 1.0, 2.0]).unwrap();
        let sched = ScheduleSpec::new(ScheduleFamily::Polynomial { p: 1.0 }, 4.0).unwrap();
        let mut rng = replication_rng(5, 1);
        let (s1, r1) = step(&state, &square(), &sched, &mut rng).unwrap();
        assert_eq!(r1.step, 1);
        assert_eq!(r1.drawn.iter().sum::<u64>(), 1);
        let (s2, r2) = step(&s1, &square(), &sched, &mut rng).unwrap();
        assert_eq!(r2.drawn.iter().sum::<u64>(), 2);
        assert_eq!(s2.total(), 7.0);
        assert_eq!(s2.step_index(), 2);
        assert!(r2.martingale_increment.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn zero_steps_echo_initial_proportions() {
        let out = run(
            &[1.0, 3.0],
            &square(),
            &unit_schedule(4.0),
            0,
            &RunOptions::default(),
            seed(1),
            &mut replication_rng(1, 0),
        )
        .unwrap();
        assert_eq!(out.summary.final_theta, vec![0.25, 0.75]);
        assert_eq!(out.summary.dominance_margin, 0.75);
        assert_eq!(out.summary.fixation, None);
        assert_eq!(out.snapshots.len(), 1);
    }

    #[test]
    fn recursion_identity_holds_stepwise() {
        let f = square();
        let sched = ScheduleSpec::new(ScheduleFamily::Polynomial { p: 1.0 }, 2.0).unwrap();
        let options = RunOptions {
            trajectory: TrajectoryMode::Full,
            ..RunOptions::default()
        };
        let out = run(
            &[1.0, 1.0],
            &f,
            &sched,
            500,
            &options,
            seed(9),
            &mut replication_rng(9, 0),
        )
        .unwrap();
        let draws = out.draws.unwrap();
        for (w, rec) in out.snapshots.windows(2).zip(&draws) {
            let sigma = rec.sigma as f64;
            for i in 0..2 {
                let drift = rec.probs[i] - w[0].theta[i];
                let rhs = sigma / w[1].tau * (drift + rec.martingale_increment[i] / sigma);
                assert!((w[1].theta[i] - w[0].theta[i] - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn thinned_snapshots_include_endpoints() {
        assert_eq!(snapshot_steps(10, 3), vec![0, 5, 10]);
        assert_eq!(snapshot_steps(3, 512), vec![0, 1, 2, 3]);
        let out = run(
            &[1.0, 1.0],
            &square(),
            &unit_schedule(2.0),
            1000,
            &RunOptions {
                trajectory: TrajectoryMode::Thinned(11),
                ..RunOptions::default()
            },
            seed(2),
            &mut replication_rng(2, 0),
        )
        .unwrap();
        let steps: Vec<u64> = out.snapshots.iter().map(|s| s.step).collect();
        assert_eq!(steps, (0..=10).map(|k| k * 100).collect::<Vec<_>>());
        for s in &out.snapshots {
            assert!((s.theta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(detect_dominance(&[0.99, 0.007, 0.003], 0.05), Some(0));
        assert_eq!(detect_dominance(&[0.5, 0.5], 0.05), None);
        assert_eq!(detect_dominance(&[0.96, 0.04], 0.05), Some(0));
        assert_eq!(detect_dominance(&[0.5, 0.5], 0.5), Some(0));
    }

    fn record(step: u64, drawn: Vec<u64>) -> DrawRecord {
        let d = drawn.len();
        DrawRecord {
            step,
            sigma: drawn.iter().sum(),
            drawn,
            probs: vec![1.0 / d as f64; d],
            martingale_increment: vec![0.0; d],
        }
    }

    #[test]
    fn fixation_examples() {
        // colour index 1 (the second colour) receives everything from step 51 on
        let mut history: Vec<DrawRecord> = (1..=50).map(|n| record(n, vec![1, 0, 0])).collect();
        history.extend((51..=20_050).map(|n| record(n, vec![0, 1, 0])));
        let fix = detect_fixation(&history, 10_000).unwrap();
        assert_eq!(fix.colour, 1);
        assert_eq!(fix.onset, 51);

        history.push(record(20_051, vec![0, 0, 1]));
        history.extend((20_052..=20_100).map(|n| record(n, vec![0, 1, 0])));
        assert_eq!(detect_fixation(&history, 10_000), None);
        assert!(detect_fixation(&history, 49).is_some());
    }

    #[test]
    fn fixation_split_step_resets_onset() {
        let mut history = vec![record(1, vec![2, 0]), record(2, vec![1, 1])];
        history.extend((3..=10).map(|n| record(n, vec![3, 0])));
        let fix = detect_fixation(&history, 5).unwrap();
        assert_eq!((fix.colour, fix.onset), (0, 3));
        assert_eq!(detect_fixation(&history, 11), None);
    }

    #[test]
    fn same_seed_same_summary() {
        let go = || {
            run(
                &[1.0, 1.0, 1.0],
                &square(),
                &unit_schedule(3.0),
                2_000,
                &RunOptions::default(),
                SeedProvenance {
                    master_seed: 42,
                    replication: 7,
                },
                &mut replication_rng(42, 7),
            )
            .unwrap()
            .summary
        };
        assert_eq!(go(), go());
    }

    #[test]
    fn distinct_replications_use_distinct_streams() {
        let a: u64 = replication_rng(1, 0).random();
        let b: u64 = replication_rng(1, 1).random();
        assert_ne!(a, b);
    }
}
