//! The deterministic skeleton of the urn: the mean-field vector field
//! `h(y) = f_d(y) / |f_d(y)|_1 - y` on the simplex, its zeros, their linear
//! stability, the flow of `y' = h(y)` and the Lyapunov function
//! `F(y) = sum_i int_0^{y_i} f(z)/z dz`, which increases along the flow.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature;
use crate::reinforce::{Boundary, ReinforceError, ReinforcementSpec};

/// Largest `d` for which all `2^d - 1` equilibria are enumerated.
pub const MAX_ENUMERATION_COLOURS: usize = 20;
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;
pub const STABILITY_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_HORIZON: f64 = 200.0;
pub const DEFAULT_STOP_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-10;
const DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("mean-field model needs d >= 2, got {0}")]
    TooFewColours(usize),
    #[error("reinforcement function fails the monotonicity/endpoint checks: {0}")]
    NotMonotone(String),
    #[error("point {y:?} is not on the {d}-simplex")]
    NotOnSimplex { y: Vec<f64>, d: usize },
    #[error("selection weights vanish at {y:?}")]
    ZeroDenominator { y: Vec<f64> },
    #[error("enumerating 2^{d} - 1 equilibria is too large (limit d = {MAX_ENUMERATION_COLOURS}); enumerate by support size instead")]
    TooManyColours { d: usize },
    #[error("RK4 drifted {drift:e} off the simplex at t = {t}; use a smaller dt")]
    Unstable { t: f64, drift: f64 },
    #[error("invalid flow parameters: {0}")]
    BadFlowParameters(String),
    #[error("quadrature for coordinate {coordinate} did not converge (error estimate {error:e})")]
    Quadrature { coordinate: usize, error: f64 },
    #[error(transparent)]
    Reinforce(#[from] ReinforceError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldModel {
    d: usize,
    f: ReinforcementSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Trivial,
    Nontrivial,
}

/// Uniform distribution over a non-empty set of colours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub support: Vec<usize>,
    pub coordinates: Vec<f64>,
    pub kind: EquilibriumKind,
    /// `|h(e)|_inf`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Unstable,
    Stable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub point: Vec<f64>,
    /// Jacobian of `h` in the tangent basis `e_k - e_d`, `k < d`, row-major.
    pub tangent_jacobian: Vec<Vec<f64>>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub spectral_abscissa: f64,
    pub classification: Stability,
    /// Largest gap between the diagonal of `D Psi` in reduced coordinates and
    /// its closed form at an equilibrium; `None` away from equilibria.
    pub closed_form_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// True if the run stopped because `|h|_inf` fell below the stop tolerance.
    pub converged: bool,
}

impl FlowTrajectory {
    pub fn last(&self) -> &[f64] {
        self.points
            .last()
            .expect("trajectory always holds its start")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dt: f64,
    pub horizon: f64,
    pub stop_tolerance: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            horizon: DEFAULT_HORIZON,
            stop_tolerance: DEFAULT_STOP_TOLERANCE,
        }
    }
}

/// Clamps negatives to zero and rescales onto the simplex.
fn project(y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = y.iter().sum();
    if s > 0.0 {
        y.iter_mut().for_each(|v| *v /= s);
    }
}

impl MeanFieldModel {
    pub fn new(d: usize, f: ReinforcementSpec) -> Result<Self, MeanFieldError> {
        if d < 2 {
            return Err(MeanFieldError::TooFewColours(d));
        }
        let report = f.validate_class_r();
        if !report.cond_a.passed {
            let detail = report
                .cond_a
                .worst
                .map(|v| format!("{} at x = {}", v.detail, v.x))
                .unwrap_or_default();
            return Err(MeanFieldError::NotMonotone(detail));
        }
        Ok(Self { d, f })
    }

    pub fn colours(&self) -> usize {
        self.d
    }

    pub fn reinforcement(&self) -> &ReinforcementSpec {
        &self.f
    }

    fn check_simplex(&self, y: &[f64]) -> Result<(), MeanFieldError> {
        let ok = y.len() == self.d
            && y.iter().all(|v| {
                v.is_finite() && *v >= -SIMPLEX_TOLERANCE && *v <= 1.0 + SIMPLEX_TOLERANCE
            })
            && (y.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOLERANCE;
        if ok {
            Ok(())
        } else {
            Err(MeanFieldError::NotOnSimplex {
                y: y.to_vec(),
                d: self.d,
            })
        }
    }

    /// Selection probabilities `Psi(y)` into `out`; returns `|f_d(y)|_1`.
    fn psi_into(&self, y: &[f64], out: &mut [f64]) -> Result<f64, MeanFieldError> {
        let mut norm = 0.0;
        for (p, &v) in out.iter_mut().zip(y) {
            *p = self.f.eval_unchecked(v.clamp(0.0, 1.0));
            norm += *p;
        }
        if !(norm > 0.0) {
            return Err(MeanFieldError::ZeroDenominator { y: y.to_vec() });
        }
        out.iter_mut().for_each(|p| *p /= norm);
        Ok(norm)
    }

    fn h_into(&self, y: &[f64], out: &mut [f64]) -> Result<(), MeanFieldError> {
        self.psi_into(y, out)?;
        out.iter_mut().zip(y).for_each(|(o, v)| *o -= v);
        Ok(())
    }

    /// Mean-field drift at a point of the simplex; its coordinates sum to 0.
    pub fn h(&self, y: &[f64]) -> Result<Vec<f64>, MeanFieldError> {
        self.check_simplex(y)?;
        let mut out = vec![0.0; self.d];
        self.h_into(y, &mut out)?;
        Ok(out)
    }

    /// One point per non-empty subset of colours, ordered by support size.
    pub fn equilibria(&self) -> Result<Vec<EquilibriumPoint>, MeanFieldError> {
        let d = self.d;
        if d > MAX_ENUMERATION_COLOURS {
            return Err(MeanFieldError::TooManyColours { d });
        }
        let mut masks: Vec<u32> = (1..(1u32 << d)).collect();
        masks.sort_by_cached_key(|&m| {
            (
                m.count_ones(),
                (0..d).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>(),
            )
        });
        let mut out = Vec::with_capacity(masks.len());
        let mut drift = vec![0.0; d];
        for mask in masks {
            let support: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
            let share = 1.0 / support.len() as f64;
            let mut coordinates = vec![0.0; d];
            support.iter().for_each(|&i| coordinates[i] = share);
            self.h_into(&coordinates, &mut drift)?;
            let residual = drift.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            out.push(EquilibriumPoint {
                kind: if support.len() == 1 {
                    EquilibriumKind::Trivial
                } else {
                    EquilibriumKind::Nontrivial
                },
                support,
                coordinates,
                residual,
            });
        }
        Ok(out)
    }

    /// `D Psi(y)` as a dense `d x d` matrix, using one-sided derivatives of
    /// `f` at coordinates equal to 0 or 1.
    pub fn psi_jacobian(&self, y: &[f64]) -> Result<DMatrix<f64>, MeanFieldError> {
        self.check_simplex(y)?;
        let d = self.d;
        let values: Vec<f64> = y
            .iter()
            .map(|&v| self.f.eval_unchecked(v.clamp(0.0, 1.0)))
            .collect();
        let slopes = y
            .iter()
            .map(|&v| self.f.slope(v.clamp(0.0, 1.0)))
            .collect::<Result<Vec<f64>, _>>()?;
        let norm: f64 = values.iter().sum();
        if !(norm > 0.0) {
            return Err(MeanFieldError::ZeroDenominator { y: y.to_vec() });
        }
        Ok(DMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { slopes[i] / norm } else { 0.0 };
            diag - values[i] * slopes[j] / (norm * norm)
        }))
    }

    /// Linearisation of `h` restricted to the tangent space of the simplex.
    pub fn jacobian(&self, y: &[f64]) -> Result<StabilityReport, MeanFieldError> {
        let d = self.d;
        let dpsi = self.psi_jacobian(y)?;
        let m = d - 1;
        // (J v_k)_i for v_k = e_k - e_d, expressed in the same basis.
        let tangent = DMatrix::from_fn(m, m, |i, k| {
            let identity = if i == k { 1.0 } else { 0.0 };
            dpsi[(i, k)] - dpsi[(i, m)] - identity
        });
        let eigenvalues: Vec<Eigenvalue> = tangent
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|z| Eigenvalue { re: z.re, im: z.im })
            .collect();
        let spectral_abscissa = eigenvalues
            .iter()
            .map(|e| e.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let classification = if spectral_abscissa > STABILITY_TOLERANCE {
            Stability::Unstable
        } else if spectral_abscissa < -STABILITY_TOLERANCE {
            Stability::Stable
        } else {
            Stability::Marginal
        };
        let closed_form_residual = self.closed_form_residual(y, &dpsi)?;
        Ok(StabilityReport {
            point: y.to_vec(),
            tangent_jacobian: (0..m)
                .map(|i| tangent.row(i).iter().copied().collect())
                .collect(),
            eigenvalues,
            spectral_abscissa,
            classification,
            closed_form_residual,
        })
    }

    /// At an equilibrium, compares `d Psi_a / d x_a` in the reduced
    /// coordinates `(x_1..x_{d-1}, 1 - sum)` with its closed form: the
    /// elasticity `alpha(e_a)` when `e_a = e_d`, and
    /// `alpha(e_a) - f(e_a)(f'(e_a) - f'(0)) / S^2` when `e_d = 0`.
    fn closed_form_residual(
        &self,
        y: &[f64],
        dpsi: &DMatrix<f64>,
    ) -> Result<Option<f64>, MeanFieldError> {
        let d = self.d;
        let support: Vec<usize> = (0..d).filter(|&i| y[i] > 0.0).collect();
        let share = 1.0 / support.len() as f64;
        if support.iter().any(|&i| (y[i] - share).abs() > 1e-12) {
            return Ok(None);
        }
        let last = d - 1;
        let norm: f64 = y.iter().map(|&v| self.f.eval_unchecked(v)).sum();
        let slope_zero = self.f.one_sided_derivative(Boundary::Zero)?;
        let mut worst: f64 = 0.0;
        for &a in support.iter().filter(|&&a| a != last) {
            let x = y[a];
            let (fx, dfx) = (self.f.eval_unchecked(x), self.f.slope(x)?);
            let alpha = x * dfx / fx;
            let expected = if y[last] == x {
                alpha
            } else {
                alpha - fx * (dfx - slope_zero) / (norm * norm)
            };
            let reduced = dpsi[(a, a)] - dpsi[(a, last)];
            worst = worst.max((reduced - expected).abs());
        }
        Ok(Some(worst))
    }

    /// Classical RK4 for `y' = h(y)` with clamp-and-renormalise after every
    /// step. Stage points are projected before `h` is evaluated.
    pub fn flow(
        &self,
        y0: &[f64],
        options: &FlowOptions,
    ) -> Result<FlowTrajectory, MeanFieldError> {
        self.check_simplex(y0)?;
        let FlowOptions {
            dt,
            horizon,
            stop_tolerance,
        } = *options;
        if !(dt > 0.0 && dt.is_finite() && horizon >= 0.0 && horizon.is_finite()) {
            return Err(MeanFieldError::BadFlowParameters(format!(
                "dt = {dt}, T = {horizon}"
            )));
        }
        let d = self.d;
        let mut y = y0.to_vec();
        project(&mut y);
        let mut times = vec![0.0];
        let mut points = vec![y.clone()];
        let (mut k1, mut k2, mut k3, mut k4) =
            (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
        let mut stage = vec![0.0; d];
        let steps = (horizon / dt).round() as u64;

        let eval =
            |at: &[f64], out: &mut [f64], stage: &mut Vec<f64>| -> Result<(), MeanFieldError> {
                stage.copy_from_slice(at);
                project(stage);
                self.h_into(stage, out)
            };

        self.h_into(&y, &mut k1)?;
        if k1.iter().all(|v| v.abs() < stop_tolerance) {
            return Ok(FlowTrajectory {
                times,
                points,
                converged: true,
            });
        }
        let mut tmp = vec![0.0; d];
        for n in 1..=steps {
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * dt * k1[i];
            }
            eval(&tmp, &mut k2, &mut stage)?;
            for i in 0..d {
                tmp[i] = y[i] + 0.5 * dt * k2[i];
            }
            eval(&tmp, &mut k3, &mut stage)?;
            for i in 0..d {
                tmp[i] = y[i] + dt * k3[i];
            }
            eval(&tmp, &mut k4, &mut stage)?;
            for i in 0..d {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let t = n as f64 * dt;
            y.iter_mut().for_each(|v| *v = v.max(0.0));
            let drift = (y.iter().sum::<f64>() - 1.0).abs();
            if drift > DRIFT_LIMIT || y.iter().any(|v| !v.is_finite()) {
                return Err(MeanFieldError::Unstable { t, drift });
            }
            project(&mut y);
            times.push(t);
            points.push(y.clone());
            self.h_into(&y, &mut k1)?;
            if k1.iter().all(|v| v.abs() < stop_tolerance) {
                return Ok(FlowTrajectory {
                    times,
                    points,
                    converged: true,
                });
            }
        }
        Ok(FlowTrajectory {
            times,
            points,
            converged: false,
        })
    }

    /// `F(y) = sum_i int_0^{y_i} f(z)/z dz`, with the integrand extended to
    /// `z = 0` by `f'(0+)`.
    pub fn lyapunov(&self, y: &[f64]) -> Result<f64, MeanFieldError> {
        self.lyapunov_with_tolerance(y, DEFAULT_QUADRATURE_TOLERANCE)
    }

    pub fn lyapunov_with_tolerance(&self, y: &[f64], tol: f64) -> Result<f64, MeanFieldError> {
        self.check_simplex(y)?;
        let at_zero = self.f.one_sided_derivative(Boundary::Zero)?;
        let f = &self.f;
        let integrand = |z: f64| {
            if z <= 0.0 {
                at_zero
            } else {
                f.eval_unchecked(z.min(1.0)) / z
            }
        };
        let mut total = 0.0;
        for (coordinate, &v) in y.iter().enumerate() {
            let upper = v.clamp(0.0, 1.0);
            total += quadrature::integrate(integrand, 0.0, upper, tol).map_err(|e| {
                MeanFieldError::Quadrature {
                    coordinate,
                    error: e.error,
                }
            })?;
        }
        Ok(total)
    }

    /// Index of the enumerated equilibrium nearest to `y` and its distance.
    pub fn nearest_equilibrium(
        &self,
        y: &[f64],
        equilibria: &[EquilibriumPoint],
    ) -> Option<(usize, f64)> {
        equilibria
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let dist = e
                    .coordinates
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (i, dist)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(d: usize, a: f64) -> MeanFieldModel {
        MeanFieldModel::new(d, ReinforcementSpec::power(a).unwrap()).unwrap()
    }

    #[test]
    fn h_examples() {
        let m = model(3, 2.0);
        assert!(m
            .h(&[1.0 / 3.0; 3])
            .unwrap()
            .iter()
            .all(|v| v.abs() < 1e-15));
        assert_eq!(m.h(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        let h = model(2, 2.0).h(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((h[0] + 2.0 / 15.0).abs() < 1e-15 && (h[1] - 2.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn h_rejects_points_off_simplex() {
        let m = model(2, 2.0);
        assert!(matches!(
            m.h(&[0.7, 0.7]),
            Err(MeanFieldError::NotOnSimplex { .. })
        ));
        assert!(m.h(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn tables_vanishing_off_the_origin_are_rejected() {
        let f = ReinforcementSpec::tabulated(vec![[0.0, 0.0], [0.6, 0.0], [1.0, 1.0]]);
        assert!(matches!(
            MeanFieldModel::new(2, f.unwrap()),
            Err(MeanFieldError::NotMonotone(_))
        ));
    }

    #[test]
    fn equilibria_examples() {
        let two = model(2, 2.0).equilibria().unwrap();
        let coords: Vec<Vec<f64>> = two.iter().map(|e| e.coordinates.clone()).collect();
        assert_eq!(coords, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);

        let three = model(3, 2.0).equilibria().unwrap();
        assert_eq!(three.len(), 7);
        assert!(three.iter().any(|e| e.coordinates == vec![1.0 / 3.0; 3]));
        let halves = three.iter().filter(|e| e.support.len() == 2).count();
        assert_eq!(halves, 3);
        assert!(three.iter().all(|e| e.residual < 1e-12));
        assert_eq!(
            three
                .iter()
                .filter(|e| e.kind == EquilibriumKind::Trivial)
                .count(),
            3
        );
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(
            model(21, 2.0).equilibria(),
            Err(MeanFieldError::TooManyColours { d: 21 })
        ));
    }

    #[test]
    fn uniform_two_colour_equilibrium_is_unstable_with_unit_eigenvalue() {
        let report = model(2, 2.0).jacobian(&[0.5, 0.5]).unwrap();
        assert_eq!(report.eigenvalues.len(), 1);
        assert!((report.spectral_abscissa - 1.0).abs() < 1e-12);
        assert_eq!(report.classification, Stability::Unstable);
        assert!(report.closed_form_residual.unwrap() < 1e-12);
    }

    #[test]
    fn vertex_is_stable() {
        let report = model(2, 2.0).jacobian(&[1.0, 0.0]).unwrap();
        assert!((report.spectral_abscissa + 1.0).abs() < 1e-12);
        assert_eq!(report.classification, Stability::Stable);
        assert!(report.closed_form_residual.unwrap() < 1e-12);
    }

    #[test]
    fn linear_reinforcement_is_marginal_at_uniform() {
        let report = model(3, 1.0).jacobian(&[1.0 / 3.0; 3]).unwrap();
        assert_eq!(report.classification, Stability::Marginal);
    }

    #[test]
    fn off_equilibrium_has_no_closed_form_check() {
        let report = model(3, 2.0).jacobian(&[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(report.closed_form_residual, None);
    }

    #[test]
    fn flow_from_equilibrium_is_constant() {
        let m = model(3, 2.0);
        let traj = m.flow(&[0.5, 0.0, 0.5], &FlowOptions::default()).unwrap();
        assert!(traj.converged);
        assert_eq!(traj.points.len(), 1);
    }

    #[test]
    fn flow_two_colours_matches_dense_euler_oracle() {
        // Oracle: x' = x^2/(x^2+(1-x)^2) - x with explicit Euler at dt = 1e-4.
        let mut x: f64 = 0.6;
        let dt = 1e-4;
        for _ in 0..(5.0 / dt) as usize {
            x += dt * (x * x / (x * x + (1.0 - x) * (1.0 - x)) - x);
        }
        let m = model(2, 2.0);
        let traj = m
            .flow(
                &[0.6, 0.4],
                &FlowOptions {
                    horizon: 5.0,
                    stop_tolerance: 0.0,
                    ..FlowOptions::default()
                },
            )
            .unwrap();
        assert!(
            (traj.last()[0] - x).abs() < 1e-3,
            "rk4 {} euler {x}",
            traj.last()[0]
        );

        let full = m.flow(&[0.6, 0.4], &FlowOptions::default()).unwrap();
        assert!(full.converged);
        assert!((full.last()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn flow_rejects_bad_parameters() {
        let m = model(2, 2.0);
        let bad = FlowOptions {
            dt: 0.0,
            ..FlowOptions::default()
        };
        assert!(matches!(
            m.flow(&[0.6, 0.4], &bad),
            Err(MeanFieldError::BadFlowParameters(_))
        ));
    }

    #[test]
    fn flow_detects_instability_for_huge_steps() {
        let m = model(3, 5.0);
        let bad = FlowOptions {
            dt: 50.0,
            horizon: 1000.0,
            stop_tolerance: 0.0,
        };
        let result = m.flow(&[0.2, 0.3, 0.5], &bad);
        assert!(
            matches!(result, Err(MeanFieldError::Unstable { .. })),
            "{result:?}"
        );
    }

    #[test]
    fn lyapunov_examples() {
        let m = model(2, 2.0);
        assert!((m.lyapunov(&[0.5, 0.5]).unwrap() - 0.25).abs() < 1e-12);
        assert!((m.lyapunov(&[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
        let y = [0.2, 0.3, 0.5];
        let expected: f64 = y.iter().map(|v| v * v / 2.0).sum();
        assert!((model(3, 2.0).lyapunov(&y).unwrap() - expected).abs() < 1e-12);
        // f(z)/z = sqrt(z) for f = z^1.5
        let f15 = model(2, 1.5);
        let expected = (2.0 / 3.0) * (0.3f64.powf(1.5) + 0.7f64.powf(1.5));
        assert!((f15.lyapunov(&[0.3, 0.7]).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn lyapunov_increases_along_flow() {
        let m = MeanFieldModel::new(3, ReinforcementSpec::power_exp(0.1).unwrap()).unwrap();
        let traj = m.flow(&[0.25, 0.35, 0.4], &FlowOptions::default()).unwrap();
        let values: Vec<f64> = traj.points.iter().map(|y| m.lyapunov(y).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        assert!(values.last().unwrap() > &values[0]);
    }
}
