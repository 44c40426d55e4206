//! Addition schedules `sigma_n`, running totals `tau_n`, and the two
//! summability conditions on `sigma_n / tau_n` that dominance requires:
//! the ratios must not be summable, their squares must be.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest integer exactly representable in an `f64`.
pub const EXACT_INTEGER_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("schedule index must be >= 1, got {0}")]
    ZeroIndex(u64),
    #[error("sigma_{n} overflows the exact integer range")]
    Overflow { n: u64 },
    #[error("explicit schedule of length {len} exhausted at step {n}")]
    Exhausted { n: u64, len: usize },
    #[error("invalid schedule: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnExhaust {
    #[default]
    Cycle,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScheduleFamily {
    /// `sigma_n = c`.
    Constant { c: u64 },
    /// `sigma_n = max(1, round(n^p))`.
    Polynomial { p: f64 },
    /// `sigma_n = values[n - 1]`.
    Explicit {
        values: Vec<u64>,
        #[serde(default)]
        on_exhaust: OnExhaust,
    },
}

impl ScheduleFamily {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            ScheduleFamily::Constant { c } if *c == 0 => Err(ScheduleError::Invalid(
                "constant schedule needs c >= 1".into(),
            )),
            ScheduleFamily::Polynomial { p } if !(p.is_finite() && *p >= 0.0) => {
                Err(ScheduleError::Invalid(format!(
                    "polynomial degree must be finite and >= 0, got {p}"
                )))
            }
            ScheduleFamily::Explicit { values, .. } if values.is_empty() => {
                Err(ScheduleError::Invalid("explicit schedule is empty".into()))
            }
            ScheduleFamily::Explicit { values, .. } if values.contains(&0) => Err(
                ScheduleError::Invalid("explicit schedule entries must be >= 1".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// A validated schedule together with the initial total `tau_0 = |U_0|_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSpec {
    family: ScheduleFamily,
    tau0: f64,
    /// `tau_0 ..= tau_k` for some prefix, filled by [`ScheduleSpec::with_cache`].
    totals: Vec<f64>,
}

impl ScheduleSpec {
    pub fn new(family: ScheduleFamily, tau0: f64) -> Result<Self, ScheduleError> {
        family.validate()?;
        if !(tau0.is_finite() && tau0 > 0.0) {
            return Err(ScheduleError::Invalid(format!(
                "tau0 must be positive, got {tau0}"
            )));
        }
        Ok(Self {
            family,
            tau0,
            totals: vec![tau0],
        })
    }

    /// Precomputes `tau_0 ..= tau_horizon`.
    pub fn with_cache(mut self, horizon: u64) -> Result<Self, ScheduleError> {
        let mut totals = Vec::with_capacity(horizon as usize + 1);
        let mut tau = self.tau0;
        totals.push(tau);
        for n in 1..=horizon {
            tau += self.sigma(n)? as f64;
            totals.push(tau);
        }
        self.totals = totals;
        Ok(self)
    }

    pub fn family(&self) -> &ScheduleFamily {
        &self.family
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    /// `sigma_n` for `n >= 1`.
    pub fn sigma(&self, n: u64) -> Result<u64, ScheduleError> {
        if n == 0 {
            return Err(ScheduleError::ZeroIndex(n));
        }
        match &self.family {
            ScheduleFamily::Constant { c } => Ok(*c),
            ScheduleFamily::Polynomial { p } => {
                let value = (n as f64).powf(*p).round();
                if !value.is_finite() || value > EXACT_INTEGER_LIMIT {
                    return Err(ScheduleError::Overflow { n });
                }
                Ok((value as u64).max(1))
            }
            ScheduleFamily::Explicit { values, on_exhaust } => {
                let idx = (n - 1) as usize;
                match (values.get(idx), on_exhaust) {
                    (Some(v), _) => Ok(*v),
                    (None, OnExhaust::Cycle) => Ok(values[idx % values.len()]),
                    (None, OnExhaust::Error) => Err(ScheduleError::Exhausted {
                        n,
                        len: values.len(),
                    }),
                }
            }
        }
    }

    /// `tau_n = tau_0 + sum_{j=1}^n sigma_j`.
    pub fn tau(&self, n: u64) -> Result<f64, ScheduleError> {
        if let Some(t) = self.totals.get(n as usize) {
            return Ok(*t);
        }
        if let ScheduleFamily::Constant { c } = self.family {
            return Ok(self.tau0 + (c as f64) * n as f64);
        }
        let start = self.totals.len() as u64 - 1;
        let mut tau = *self.totals.last().expect("tau0 always cached");
        for j in start + 1..=n {
            tau += self.sigma(j)? as f64;
        }
        Ok(tau)
    }

    /// Largest admissible `delta_n = sigma_{n+1} / (tau_n + 2 sigma_{n+1})`;
    /// tends to zero with `sum delta_n sigma_{n+1} / tau_{n+1}` finite.
    pub fn delta(&self, n: u64) -> Result<f64, ScheduleError> {
        let next = self.sigma(n + 1)? as f64;
        Ok(next / (self.tau(n)? + 2.0 * next))
    }

    /// Length of the schedule when it cannot be extended past a fixed horizon.
    pub fn finite_len(&self) -> Option<u64> {
        match &self.family {
            ScheduleFamily::Explicit {
                values,
                on_exhaust: OnExhaust::Error,
            } => Some(values.len() as u64),
            _ => None,
        }
    }

    /// Verdicts on `sum sigma_n/tau_n = inf` and `sum (sigma_n/tau_n)^2 < inf`.
    ///
    /// Constant and polynomial schedules have `sigma_n / tau_n ~ (p+1)/n`, so
    /// the verdict is analytic. Explicit schedules get a log-log slope fit of
    /// the ratio over the second half of the horizon.
    pub fn check_conditions(&self, horizon: u64) -> Result<ConditionReport, ScheduleError> {
        let horizon = match self.finite_len() {
            Some(len) => horizon.min(len),
            None => horizon,
        };
        let mut ratios = Vec::with_capacity(horizon as usize);
        let mut tau = self.tau0;
        let (mut sum_i, mut sum_ii) = (0.0, 0.0);
        for n in 1..=horizon {
            let s = self.sigma(n)? as f64;
            tau += s;
            let r = s / tau;
            sum_i += r;
            sum_ii += r * r;
            ratios.push(r);
        }
        let ratio_tail = ratios.last().copied().unwrap_or(0.0);

        let (cond_i, cond_ii, basis, tail_exponent) = match self.family {
            ScheduleFamily::Constant { .. } | ScheduleFamily::Polynomial { .. } => (
                Verdict::Diverges,
                Verdict::Converges,
                VerdictBasis::Analytic,
                None,
            ),
            ScheduleFamily::Explicit { .. } => {
                let (i, ii, beta) = heuristic_verdicts(&ratios);
                (i, ii, VerdictBasis::Heuristic, beta)
            }
        };
        Ok(ConditionReport {
            cond_i_verdict: cond_i,
            cond_ii_verdict: cond_ii,
            partial_sum_i: sum_i,
            partial_sum_ii: sum_ii,
            ratio_tail,
            tail_exponent,
            horizon,
            basis,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictBasis {
    Analytic,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `sum sigma_n / tau_n` (required: diverges).
    pub cond_i_verdict: Verdict,
    /// `sum (sigma_n / tau_n)^2` (required: converges).
    pub cond_ii_verdict: Verdict,
    pub partial_sum_i: f64,
    pub partial_sum_ii: f64,
    /// `sigma_N / tau_N` at the horizon.
    pub ratio_tail: f64,
    /// Fitted decay exponent `beta` in `sigma_n / tau_n ~ n^-beta` (heuristic only).
    pub tail_exponent: Option<f64>,
    pub horizon: u64,
    pub basis: VerdictBasis,
}

impl ConditionReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.cond_i_verdict == Verdict::Diverges && self.cond_ii_verdict == Verdict::Converges
    }
}

const MIN_HEURISTIC_HORIZON: usize = 16;
const TAIL_BLOCKS: usize = 8;

fn heuristic_verdicts(ratios: &[f64]) -> (Verdict, Verdict, Option<f64>) {
    let m = ratios.len();
    if m < MIN_HEURISTIC_HORIZON {
        return (Verdict::Inconclusive, Verdict::Inconclusive, None);
    }
    // Block averages over [m/2, m] smooth out periodic schedules.
    let tail = &ratios[m / 2..];
    let offset = m / 2 + 1;
    let block = (tail.len() / TAIL_BLOCKS).max(1);
    let points: Vec<(f64, f64)> = tail
        .chunks(block)
        .enumerate()
        .filter(|(_, c)| c.len() == block)
        .map(|(b, c)| {
            let mid = offset as f64 + (b * block) as f64 + (block as f64 - 1.0) / 2.0;
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            (mid.ln(), mean.ln())
        })
        .collect();
    let beta = -least_squares_slope(&points);

    let cond_i = if beta < 1.1 {
        Verdict::Diverges
    } else if beta > 1.3 {
        Verdict::Converges
    } else {
        Verdict::Inconclusive
    };
    let cond_ii = if beta > 0.6 {
        Verdict::Converges
    } else if beta < 0.4 {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    };
    (cond_i, cond_ii, Some(beta))
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
