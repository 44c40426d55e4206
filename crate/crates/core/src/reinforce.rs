//! Reinforcement functions `f: [0,1] -> R+` and numerical certification of
//! the regularity class under which dominance and fixation hold.
//!
//! A function belongs to the class when it is non-decreasing and continuous
//! with `f(0) = 0`, `f(1) = 1` (condition A), is C¹ on the open interval with
//! finite one-sided derivative limits at both ends (condition B), and its
//! elasticity `x f'(x) / f(x)` is bounded below by some `alpha > 1`
//! (condition C).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inset used to keep grid scans away from the endpoints.
pub const GRID_INSET: f64 = 1e-6;
/// Default number of points for infimum and monotonicity scans.
pub const DEFAULT_GRID_POINTS: usize = 10_001;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;
/// Condition C passes iff `alpha_inf > 1 + ALPHA_TOLERANCE`.
pub const ALPHA_TOLERANCE: f64 = 1e-9;

const ENDPOINT_TOLERANCE: f64 = 1e-12;
const BOUNDARY_BAND: f64 = 2e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReinforceError {
    #[error("argument {x} lies outside [0, 1]")]
    Domain { x: f64 },
    #[error("derivative requested at {x}, which is not in the open interval (0, 1)")]
    NotInterior { x: f64 },
    #[error("f({x}) = 0 for x > 0: f is not strictly increasing away from the origin")]
    ZeroAtInterior { x: f64 },
    #[error("non-finite derivative at {x}: f is outside the regularity class")]
    NonFiniteDerivative { x: f64 },
    #[error("invalid reinforcement function: {0}")]
    Invalid(String),
}

/// Closed-form families plus a tabulated fallback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `f(x) = x^exponent`.
    Power { exponent: f64 },
    /// `f(x) = x^(2 + epsilon) * exp(1 - x)`; in the class but not convex.
    PowerExp { epsilon: f64 },
    /// Monotone piecewise-cubic interpolation through `(x, f(x))` pairs.
    Tabulated { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    Analytic,
    CentralDifference {
        step: f64,
    },
}

/// Which one-sided limit to take at an endpoint of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `x -> 0+`
    Zero,
    /// `x -> 1-`
    One,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSpec {
    #[serde(flatten)]
    family: Family,
    #[serde(default, skip_serializing_if = "is_analytic")]
    derivative: DerivativeMode,
}

fn is_analytic(mode: &DerivativeMode) -> bool {
    *mode == DerivativeMode::Analytic
}

/// An immutable reinforcement function with derivative access.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ReinforcementSpec {
    family: Family,
    derivative_mode: DerivativeMode,
    table: Option<MonotoneCubic>,
}

impl TryFrom<RawSpec> for ReinforcementSpec {
    type Error = ReinforceError;

    fn try_from(raw: RawSpec) -> Result<Self, Self::Error> {
        Self::with_mode(raw.family, raw.derivative)
    }
}

impl From<ReinforcementSpec> for RawSpec {
    fn from(spec: ReinforcementSpec) -> Self {
        RawSpec {
            family: spec.family,
            derivative: spec.derivative_mode,
        }
    }
}

impl ReinforcementSpec {
    pub fn power(exponent: f64) -> Result<Self, ReinforceError> {
        Self::new(Family::Power { exponent })
    }

    pub fn power_exp(epsilon: f64) -> Result<Self, ReinforceError> {
        Self::new(Family::PowerExp { epsilon })
    }

    pub fn tabulated(points: Vec<[f64; 2]>) -> Result<Self, ReinforceError> {
        Self::new(Family::Tabulated { points })
    }

    pub fn new(family: Family) -> Result<Self, ReinforceError> {
        Self::with_mode(family, DerivativeMode::Analytic)
    }

    pub fn with_mode(
        family: Family,
        derivative_mode: DerivativeMode,
    ) -> Result<Self, ReinforceError> {
        if let DerivativeMode::CentralDifference { step } = derivative_mode {
            if !(step > 0.0 && step < 0.25 && step.is_finite()) {
                return Err(ReinforceError::Invalid(format!(
                    "central-difference step must lie in (0, 0.25), got {step}"
                )));
            }
        }
        let table = match &family {
            Family::Power { exponent } => {
                if !(*exponent > 0.0 && exponent.is_finite()) {
                    return Err(ReinforceError::Invalid(format!(
                        "power exponent must be positive and finite, got {exponent}"
                    )));
                }
                None
            }
            Family::PowerExp { epsilon } => {
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(ReinforceError::Invalid(format!(
                        "power_exp epsilon must be positive and finite, got {epsilon}"
                    )));
                }
                None
            }
            Family::Tabulated { points } => Some(MonotoneCubic::new(points)?),
        };
        Ok(Self {
            family,
            derivative_mode,
            table,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.derivative_mode
    }

    fn fd_step(&self) -> Option<f64> {
        match (self.derivative_mode, &self.family) {
            (DerivativeMode::CentralDifference { step }, _) => Some(step),
            (DerivativeMode::Analytic, Family::Tabulated { .. }) => Some(DEFAULT_FD_STEP),
            (DerivativeMode::Analytic, _) => None,
        }
    }

    /// Evaluates `f(x)` for `x` in `[0, 1]`.
    pub fn evaluate(&self, x: f64) -> Result<f64, ReinforceError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(ReinforceError::Domain { x });
        }
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match &self.family {
            Family::Power { exponent } => {
                if *exponent == 2.0 {
                    x * x
                } else {
                    x.powf(*exponent)
                }
            }
            Family::PowerExp { epsilon } => x.powf(2.0 + epsilon) * (1.0 - x).exp(),
            Family::Tabulated { .. } => self.table.as_ref().expect("tabulated").eval(x),
        }
    }

    /// `f'(x)` on the open interval.
    pub fn derivative(&self, x: f64) -> Result<f64, ReinforceError> {
        if !(x > 0.0 && x < 1.0) {
            return Err(ReinforceError::NotInterior { x });
        }
        let value = match self.fd_step() {
            None => self.analytic_derivative(x),
            Some(step) => self.numeric_derivative(x, step),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ReinforceError::NonFiniteDerivative { x })
        }
    }

    /// One-sided derivative limit `f'(0+)` or `f'(1-)`.
    pub fn one_sided_derivative(&self, side: Boundary) -> Result<f64, ReinforceError> {
        let x = match side {
            Boundary::Zero => 0.0,
            Boundary::One => 1.0,
        };
        let value = match self.fd_step() {
            None => self.analytic_boundary_derivative(side),
            Some(step) => self.one_sided_difference(side, step),
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(ReinforceError::NonFiniteDerivative { x })
        }
    }

    /// Derivative on the closed interval, using one-sided limits at the ends.
    pub fn slope(&self, x: f64) -> Result<f64, ReinforceError> {
        if x == 0.0 {
            self.one_sided_derivative(Boundary::Zero)
        } else if x == 1.0 {
            self.one_sided_derivative(Boundary::One)
        } else {
            self.derivative(x)
        }
    }

    fn analytic_derivative(&self, x: f64) -> f64 {
        match &self.family {
            Family::Power { exponent } => exponent * x.powf(exponent - 1.0),
            Family::PowerExp { epsilon } => {
                (2.0 + epsilon - x) * x.powf(1.0 + epsilon) * (1.0 - x).exp()
            }
            Family::Tabulated { .. } => unreachable!("tabulated derivatives are numeric"),
        }
    }

    fn analytic_boundary_derivative(&self, side: Boundary) -> f64 {
        match (&self.family, side) {
            (Family::Power { exponent }, Boundary::Zero) => {
                if *exponent > 1.0 {
                    0.0
                } else if *exponent == 1.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            (Family::Power { exponent }, Boundary::One) => *exponent,
            (Family::PowerExp { .. }, Boundary::Zero) => 0.0,
            (Family::PowerExp { epsilon }, Boundary::One) => 1.0 + epsilon,
            (Family::Tabulated { .. }, _) => unreachable!("tabulated derivatives are numeric"),
        }
    }

    fn numeric_derivative(&self, x: f64, step: f64) -> f64 {
        let band = BOUNDARY_BAND.max(step);
        if x - 2.0 * step < 0.0 || x < band {
            let (f0, f1, f2) = (
                self.eval_unchecked(x),
                self.eval_unchecked(x + step),
                self.eval_unchecked(x + 2.0 * step),
            );
            (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step)
        } else if x + 2.0 * step > 1.0 || x > 1.0 - band {
            let (f0, f1, f2) = (
                self.eval_unchecked(x),
                self.eval_unchecked(x - step),
                self.eval_unchecked(x - 2.0 * step),
            );
            (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * step)
        } else {
            (self.eval_unchecked(x + step) - self.eval_unchecked(x - step)) / (2.0 * step)
        }
    }

    fn one_sided_difference(&self, side: Boundary, step: f64) -> f64 {
        match side {
            Boundary::Zero => self.numeric_derivative(0.0, step),
            Boundary::One => self.numeric_derivative(1.0, step),
        }
    }

    /// Elasticity `x f'(x) / f(x)` at an interior point.
    pub fn elasticity(&self, x: f64) -> Result<f64, ReinforceError> {
        let fx = self.evaluate(x)?;
        let dfx = self.derivative(x)?;
        if fx <= 0.0 {
            return Err(ReinforceError::ZeroAtInterior { x });
        }
        Ok(x * dfx / fx)
    }

    /// Limit of the elasticity as `x -> 0+`, when it can be determined.
    ///
    /// Closed-form families give it directly. Otherwise a positive `f'(0+)`
    /// forces the limit to 1; with `f'(0+) = 0` it is left to the grid scan.
    fn elasticity_at_zero(&self) -> Result<Option<f64>, ReinforceError> {
        match (&self.family, self.fd_step()) {
            (Family::Power { exponent }, None) => Ok(Some(*exponent)),
            (Family::PowerExp { epsilon }, None) => Ok(Some(2.0 + epsilon)),
            _ => {
                let slope = self.one_sided_derivative(Boundary::Zero)?;
                Ok((slope > 1e-9).then_some(1.0))
            }
        }
    }

    /// `f'(1-) / f(1)`.
    fn elasticity_at_one(&self) -> Result<f64, ReinforceError> {
        let f1 = self.eval_unchecked(1.0);
        if f1 <= 0.0 {
            return Err(ReinforceError::ZeroAtInterior { x: 1.0 });
        }
        Ok(self.one_sided_derivative(Boundary::One)? / f1)
    }

    /// Infimum of the elasticity over (0, 1).
    ///
    /// Scans a uniform grid on `[GRID_INSET, 1 - GRID_INSET]` and folds in the
    /// one-sided limits at both ends. Exact for the power family.
    pub fn alpha_inf(&self, grid_points: usize) -> Result<f64, ReinforceError> {
        if let (Family::Power { exponent }, None) = (&self.family, self.fd_step()) {
            return Ok(*exponent);
        }
        let mut best = self.elasticity_at_one()?;
        if let Some(at_zero) = self.elasticity_at_zero()? {
            best = best.min(at_zero);
        }
        for x in interior_grid(grid_points) {
            best = best.min(self.elasticity(x)?);
        }
        Ok(best)
    }

    /// Runs every class check and records failures instead of raising.
    pub fn validate_class_r(&self) -> ClassRReport {
        validate(self, DEFAULT_GRID_POINTS)
    }
}

/// Uniform grid on `[GRID_INSET, 1 - GRID_INSET]`.
pub fn interior_grid(points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    let span = 1.0 - 2.0 * GRID_INSET;
    (0..points).map(move |k| GRID_INSET + span * k as f64 / (points - 1) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub x: f64,
    pub amount: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub worst: Option<Violation>,
}

impl Check {
    fn pass() -> Self {
        Check {
            passed: true,
            worst: None,
        }
    }

    fn fail(x: f64, amount: f64, detail: impl Into<String>) -> Self {
        Check {
            passed: false,
            worst: Some(Violation {
                x,
                amount,
                detail: detail.into(),
            }),
        }
    }

    /// Keeps the larger of two violations.
    fn record(&mut self, x: f64, amount: f64, detail: impl Into<String>) {
        let replace = match &self.worst {
            None => true,
            Some(v) => amount > v.amount,
        };
        self.passed = false;
        if replace {
            self.worst = Some(Violation {
                x,
                amount,
                detail: detail.into(),
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityCheck {
    pub passed: bool,
    /// `None` when the elasticity could not be computed at all.
    pub alpha_inf: Option<f64>,
}

/// Results of the checks implied by membership in the class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaChecks {
    /// `f` is Lipschitz: derivative samples are bounded.
    pub lipschitz: Check,
    /// `f(x)/x -> f'(0+) >= 0`.
    pub slope_at_zero: Check,
    /// `x -> f(x)/x` is non-decreasing.
    pub ratio_monotone: Check,
    /// `f(x) <= x^alpha_inf`.
    pub power_bound: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRReport {
    pub cond_a: Check,
    pub cond_b: Check,
    pub cond_c: ElasticityCheck,
    pub lemma_checks: LemmaChecks,
    pub grid_points: usize,
}

impl ClassRReport {
    pub fn in_class(&self) -> bool {
        self.cond_a.passed && self.cond_b.passed && self.cond_c.passed
    }

    pub fn lemmas_hold(&self) -> bool {
        let l = &self.lemma_checks;
        l.lipschitz.passed
            && l.slope_at_zero.passed
            && l.ratio_monotone.passed
            && l.power_bound.passed
    }
}

fn validate(f: &ReinforcementSpec, grid_points: usize) -> ClassRReport {
    let mut grid: Vec<f64> = Vec::with_capacity(grid_points + 2);
    grid.push(0.0);
    grid.extend(interior_grid(grid_points));
    grid.push(1.0);
    let values: Vec<f64> = grid.iter().map(|&x| f.eval_unchecked(x)).collect();

    // (A): endpoints, finiteness, monotonicity, positivity away from 0.
    let mut cond_a = Check::pass();
    if (values[0] - 0.0).abs() > ENDPOINT_TOLERANCE {
        cond_a.record(0.0, values[0].abs(), "f(0) != 0");
    }
    let last = *values.last().unwrap();
    if (last - 1.0).abs() > ENDPOINT_TOLERANCE || !last.is_finite() {
        cond_a.record(1.0, (last - 1.0).abs(), "f(1) != 1");
    }
    for (i, (&x, &v)) in grid.iter().zip(&values).enumerate() {
        if !v.is_finite() || v < 0.0 {
            cond_a.record(x, f64::INFINITY, "f is negative or non-finite");
        } else if x > 0.0 && v <= 0.0 {
            cond_a.record(x, 0.0, "f vanishes away from the origin");
        }
        if i > 0 {
            let drop = values[i - 1] - v;
            if drop > 0.0 {
                cond_a.record(x, drop, "f decreases");
            }
        }
    }

    // (B): derivative finite on the grid and at both one-sided limits.
    let mut cond_b = Check::pass();
    let mut lipschitz = Check::pass();
    let mut max_slope: f64 = 0.0;
    for &x in &grid[1..grid.len() - 1] {
        match f.derivative(x) {
            Ok(d) => max_slope = max_slope.max(d.abs()),
            Err(_) => cond_b.record(x, f64::INFINITY, "derivative not finite"),
        }
    }
    let slope_zero = f.one_sided_derivative(Boundary::Zero);
    let slope_one = f.one_sided_derivative(Boundary::One);
    match slope_zero {
        Ok(d) => max_slope = max_slope.max(d.abs()),
        Err(_) => cond_b.record(0.0, f64::INFINITY, "f'(0+) not finite"),
    }
    match slope_one {
        Ok(d) => max_slope = max_slope.max(d.abs()),
        Err(_) => cond_b.record(1.0, f64::INFINITY, "f'(1-) not finite"),
    }
    if !cond_b.passed {
        lipschitz = Check::fail(
            cond_b.worst.as_ref().map_or(0.0, |v| v.x),
            f64::INFINITY,
            format!("unbounded slope (largest finite sample {max_slope})"),
        );
    }

    // (C)
    let alpha = f.alpha_inf(grid_points).ok();
    let cond_c = ElasticityCheck {
        passed: alpha.is_some_and(|a| a > 1.0 + ALPHA_TOLERANCE),
        alpha_inf: alpha,
    };

    let mut slope_at_zero = Check::pass();
    match slope_zero {
        Ok(d) if d >= 0.0 => {
            let probe = 1e-14;
            let ratio = f.eval_unchecked(probe) / probe;
            let gap = (ratio - d).abs();
            if gap > 1e-6 {
                slope_at_zero.record(probe, gap, "f(x)/x does not approach f'(0+)");
            }
        }
        Ok(d) => slope_at_zero.record(0.0, -d, "f'(0+) is negative"),
        Err(_) => slope_at_zero.record(0.0, f64::INFINITY, "f'(0+) not finite"),
    }

    let mut ratio_monotone = Check::pass();
    let mut power_bound = Check::pass();
    let mut prev_ratio: Option<f64> = None;
    for (&x, &v) in grid.iter().zip(&values).skip(1) {
        let ratio = v / x;
        if let Some(prev) = prev_ratio {
            let drop = prev - ratio;
            if drop > 1e-12 {
                ratio_monotone.record(x, drop, "f(x)/x decreases");
            }
        }
        prev_ratio = Some(ratio);
        match alpha {
            Some(a) => {
                let excess = v - x.powf(a);
                if excess > 1e-9 {
                    power_bound.record(x, excess, "f(x) exceeds x^alpha");
                }
            }
            None => {
                if power_bound.passed {
                    power_bound = Check::fail(x, f64::INFINITY, "alpha_inf unavailable");
                }
            }
        }
    }

    ClassRReport {
        cond_a,
        cond_b,
        cond_c,
        lemma_checks: LemmaChecks {
            lipschitz,
            slope_at_zero,
            ratio_monotone,
            power_bound,
        },
        grid_points,
    }
}

/// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson
/// slopes with the three-point endpoint rule). Monotone data gives a monotone
/// interpolant.
#[derive(Debug, Clone, PartialEq)]
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(points: &[[f64; 2]]) -> Result<Self, ReinforceError> {
        if points.len() < 2 {
            return Err(ReinforceError::Invalid(
                "tabulated f needs at least two points".into(),
            ));
        }
        let xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(ReinforceError::Invalid(
                "tabulated values must be finite".into(),
            ));
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return Err(ReinforceError::Invalid(
                "tabulated grid must start at 0 and end at 1".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ReinforceError::Invalid(
                "tabulated abscissae must be strictly increasing".into(),
            ));
        }
        if ys.iter().any(|&y| y < 0.0) {
            return Err(ReinforceError::Invalid(
                "tabulated values must be non-negative".into(),
            ));
        }

        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            slopes[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    fn eval(&self, x: f64) -> f64 {
        let k = match self.xs.partition_point(|&xk| xk <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k]
            + h10 * h * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h11 * h * self.slopes[k + 1]
    }
}

fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
