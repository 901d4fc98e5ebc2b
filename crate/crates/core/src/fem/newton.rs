//! Projected Newton with Armijo backtracking.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::CscMatrix;
use serde::{Deserialize, Serialize};

use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble, energy_and_gradient, flatten, total_energy, unflatten, HessianMode};
use crate::fem::problem::MembraneProblem;
use crate::linalg::Vec3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop when `‖g‖∞ ≤ tol` over free DOFs.
    pub tol: f64,
    pub max_iters: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub max_halvings: usize,
    pub hessian: HessianModeConfig,
    /// Relative rounding level of the total energy. When the predicted
    /// decrease `|g·d|` falls below `energy_noise · max(1, |E|)` the Armijo
    /// test cannot be evaluated in floating point, and steps are accepted on
    /// gradient-norm decrease instead (energy may not rise above the noise).
    pub energy_noise: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianModeConfig {
    Projected,
    Exact,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            max_iters: 100,
            armijo: 1e-4,
            backtrack: 0.5,
            max_halvings: 30,
            hessian: HessianModeConfig::Projected,
            energy_noise: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_norm: f64,
    /// Step length that produced this iterate (0 for the initial state).
    pub step: f64,
    /// Tikhonov shift used for the direction computed at this iterate.
    pub regularization: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub termination: Termination,
}

impl SolveReport {
    pub fn final_record(&self) -> &IterationRecord {
        self.history.last().expect("history holds the initial state")
    }

    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("iter,energy,grad_norm,step\n");
        for r in &self.history {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e}\n",
                r.iter, r.energy, r.grad_norm, r.step
            ));
        }
        out
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn shifted(h: &CscMatrix<f64>, tau: f64) -> CscMatrix<f64> {
    let mut m = h.clone();
    let (offsets, indices, values) = m.csc_data_mut();
    for col in 0..offsets.len() - 1 {
        for k in offsets[col]..offsets[col + 1] {
            if indices[k] == col {
                values[k] += tau;
            }
        }
    }
    m
}

/// Solves `H d = rhs`. On factorization failure, retries with `H + τ Id`
/// for `τ = 1e-8, 1e-7, …, 1e-2`. Returns the direction and the `τ` used.
pub fn solve_spd(h: &CscMatrix<f64>, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let b = DMatrix::from_column_slice(rhs.len(), 1, rhs);
    let attempt = |m: &CscMatrix<f64>| {
        CscCholesky::factor(m)
            .ok()
            .map(|chol| chol.solve(&b))
            .filter(|x| x.iter().all(|v| v.is_finite()))
    };
    if let Some(x) = attempt(h) {
        return Ok((x.as_slice().to_vec(), 0.0));
    }
    let mut tau = 1e-8;
    while tau <= 1e-2 * (1.0 + 1e-12) {
        if let Some(x) = attempt(&shifted(h, tau)) {
            return Ok((x.as_slice().to_vec(), tau));
        }
        tau *= 10.0;
    }
    Err(Error::LinearSolveFailed { tau: 1e-2 })
}

/// Outcome of a successful backtracking search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchStep {
    pub step: f64,
    pub energy: f64,
}

/// Armijo backtracking on `E(α)`: accepts the first `α = backtrack^k` with
/// `E(α) ≤ E0 + c α slope`. Inadmissible trial states (`Err`) are rejected
/// like any other failed trial.
pub fn backtracking_line_search(
    mut energy_at: impl FnMut(f64) -> Result<f64>,
    e0: f64,
    slope: f64,
    config: &SolverConfig,
) -> Result<LineSearchStep> {
    let mut alpha = 1.0;
    for _ in 0..=config.max_halvings {
        if let Ok(e) = energy_at(alpha) {
            if e.is_finite() && e <= e0 + config.armijo * alpha * slope {
                return Ok(LineSearchStep { step: alpha, energy: e });
            }
        }
        alpha *= config.backtrack;
    }
    Err(Error::LineSearchFailed {
        halvings: config.max_halvings,
    })
}

/// Backtracking on the pinned gradient norm, used once the energy decrease is
/// below rounding noise.
fn noise_level_search<M: EnergyModel>(
    problem: &MembraneProblem<M>,
    trial: impl Fn(f64) -> Vec<Vec3>,
    e0: f64,
    g0: f64,
    noise: f64,
    config: &SolverConfig,
) -> Result<LineSearchStep> {
    let pinned = problem.pinned_dofs();
    let mut alpha = 1.0;
    for _ in 0..=config.max_halvings {
        if let Ok((e, g)) = energy_and_gradient(problem, &trial(alpha)) {
            let g_norm = g
                .iter()
                .zip(&pinned)
                .filter(|(_, p)| !**p)
                .fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
            if e <= e0 + noise && g_norm < g0 {
                return Ok(LineSearchStep { step: alpha, energy: e });
            }
        }
        alpha *= config.backtrack;
    }
    Err(Error::LineSearchFailed {
        halvings: config.max_halvings,
    })
}

/// Minimizes the membrane energy from `x0`. Pin targets overwrite the
/// corresponding entries of `x0`. `on_iterate` sees every accepted iterate,
/// starting with the pinned initial state.
pub fn newton_solve_with<M: EnergyModel>(
    problem: &MembraneProblem<M>,
    x0: &[Vec3],
    config: &SolverConfig,
    mut on_iterate: impl FnMut(usize, &[Vec3]) -> Result<()>,
) -> Result<(Vec<Vec3>, SolveReport)> {
    if x0.len() != problem.vertex_count || !x0.iter().all(Vec3::is_finite) {
        return Err(Error::InvalidInput(
            "initial positions must be finite, one per vertex".into(),
        ));
    }
    let mode = match config.hessian {
        HessianModeConfig::Projected => HessianMode::Projected,
        HessianModeConfig::Exact => HessianMode::Exact,
    };
    let mut x = x0.to_vec();
    problem.apply_pins(&mut x);
    let mut history = Vec::new();
    let mut step = 0.0;
    on_iterate(0, &x)?;

    let mut iter = 0;
    loop {
        let asm = assemble(problem, &x, mode)?;
        let grad_norm = inf_norm(&asm.gradient);
        history.push(IterationRecord {
            iter,
            energy: asm.energy,
            grad_norm,
            step,
            regularization: 0.0,
        });
        if grad_norm <= config.tol {
            return Ok((
                x,
                SolveReport {
                    iterations: iter,
                    history,
                    termination: Termination::Converged,
                },
            ));
        }
        if iter >= config.max_iters {
            return Ok((
                x,
                SolveReport {
                    iterations: iter,
                    history,
                    termination: Termination::MaxIterations,
                },
            ));
        }

        let rhs: Vec<f64> = asm.gradient.iter().map(|g| -g).collect();
        let (dir, tau) = solve_spd(&asm.hessian, &rhs)?;
        history.last_mut().expect("just pushed").regularization = tau;
        let slope: f64 = asm.gradient.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let base = flatten(&x);
        let trial = |alpha: f64| {
            let xs: Vec<f64> = base.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
            unflatten(&xs)
        };
        let noise = config.energy_noise * asm.energy.abs().max(1.0);
        let accepted = if -slope <= noise {
            noise_level_search(problem, trial, asm.energy, grad_norm, noise, config)?
        } else {
            backtracking_line_search(|a| total_energy(problem, &trial(a)), asm.energy, slope, config)?
        };
        x = trial(accepted.step);
        step = accepted.step;
        iter += 1;
        on_iterate(iter, &x)?;
    }
}

pub fn newton_solve<M: EnergyModel>(
    problem: &MembraneProblem<M>,
    x0: &[Vec3],
    config: &SolverConfig,
) -> Result<(Vec<Vec3>, SolveReport)> {
    newton_solve_with(problem, x0, config, |_, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_search_rejects_inadmissible_trials() {
        let cfg = SolverConfig::default();
        // E(α) = (α − 0.2)² − 0.04 with an inadmissible region α > 0.3
        let result = backtracking_line_search(
            |a| {
                if a > 0.3 {
                    Err(Error::Domain { i3: 0.0 })
                } else {
                    Ok((a - 0.2).powi(2) - 0.04)
                }
            },
            0.0,
            -0.4,
            &cfg,
        )
        .unwrap();
        assert_eq!(result.step, 0.25);
    }

    #[test]
    fn line_search_reports_failure() {
        let cfg = SolverConfig::default();
        let err = backtracking_line_search(Ok, 0.0, -1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::LineSearchFailed { halvings: 30 }));
    }

    #[test]
    fn singular_system_is_regularized() {
        let mut coo = nalgebra_sparse::CooMatrix::new(2, 2);
        coo.push(0, 0, 1.0);
        coo.push(1, 1, 0.0);
        let h = CscMatrix::from(&coo);
        let (x, tau) = solve_spd(&h, &[2.0, 0.0]).unwrap();
        assert!(tau > 0.0);
        assert!((x[0] - 2.0 / (1.0 + tau)).abs() < 1e-12);
        assert_eq!(x[1], 0.0);
    }
}
