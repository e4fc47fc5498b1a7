//! Solvers for the relaxed consistent recovery problem
//! `min ½·dist(D·α, C)² + λ‖α‖₁` (ISTA, FISTA) and for the constrained
//! baseline `min ‖α‖₁ s.t. D·α ∈ C` (nested ADMM).

mod admm;
mod primitives;
mod proximal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Dictionary;

pub use admm::{inner_projection, solve_admm_constrained, AdmmConfig, NestedProjector, ProjectionOutcome};
pub use primitives::{
    fista_momentum, ista_step, kkt_residual, objective, soft_threshold, soft_threshold_in_place,
};
pub use proximal::{solve_fista, solve_ista};

/// Hyperparameters for ISTA and FISTA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Weight of the ℓ1 penalty.
    pub lambda: f64,
    /// Fixed step size; `None` uses `1/L` from the dictionary's cached estimate.
    pub step: Option<f64>,
    pub max_iter: usize,
    /// Stop when `|F_k − F_{k−1}| / max(F_{k−1}, 1e−12) < rel_tol`.
    /// Zero disables early stopping.
    pub rel_tol: f64,
    /// Initial guess; `None` starts from zero.
    pub alpha0: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            step: None,
            max_iter: 400,
            rel_tol: 1e-6,
            alpha0: None,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be positive (got {})", self.lambda)));
        }
        if let Some(step) = self.step {
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::InvalidArgument(format!("step must be positive (got {step})")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must be ≥ 0 (got {})", self.rel_tol)));
        }
        if let Some(a0) = &self.alpha0 {
            crate::error::check_len(m, a0.len())?;
        }
        Ok(())
    }

    /// The step `μ`: the configured value, or `1/L`.
    ///
    /// A configured step larger than `1/L` is rejected when `L` is cached.
    pub fn resolve_step(&self, dict: &Dictionary) -> Result<f64> {
        match self.step {
            Some(step) => {
                if let Some(l) = dict.cached_lipschitz() {
                    if step > 1.0 / l {
                        return Err(Error::InvalidArgument(format!(
                            "step {step} exceeds 1/L = {}",
                            1.0 / l
                        )));
                    }
                }
                Ok(step)
            }
            None => Ok(1.0 / dict.lipschitz()?),
        }
    }

    pub(crate) fn initial_alpha(&self, m: usize) -> Vec<f64> {
        self.alpha0.clone().unwrap_or_else(|| vec![0.0; m])
    }
}

/// Per-run diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverTrace {
    /// Objective after each iteration. For ISTA/FISTA this is the relaxed
    /// objective at `α_k`; for the ADMM baseline it is `‖α_k‖₁`.
    pub objective_per_iter: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Solver wall time, excluding the Lipschitz estimate and final diagnostics.
    pub wall_time_seconds: f64,
    pub per_iteration_seconds: f64,
    /// KKT residual of the relaxed problem at the returned point. For the
    /// ADMM baseline this holds the final primal residual `‖α − β‖₂`.
    pub kkt_residual_final: f64,
}

impl SolverTrace {
    pub(crate) fn finish(&mut self, seconds: f64) {
        self.iterations_run = self.objective_per_iter.len();
        self.wall_time_seconds = seconds;
        self.per_iteration_seconds = if self.iterations_run > 0 {
            seconds / self.iterations_run as f64
        } else {
            0.0
        };
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.objective_per_iter.last().copied()
    }
}

/// Solution and trace. Serializes to
/// `{"alpha", "objective", "iterations", "converged", "wall_time_s", "kkt_residual"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SolveReport", into = "SolveReport")]
pub struct SolveResult {
    pub alpha: Vec<f64>,
    pub trace: SolverTrace,
}

#[derive(Serialize, Deserialize)]
struct SolveReport {
    alpha: Vec<f64>,
    objective: Vec<f64>,
    iterations: usize,
    converged: bool,
    wall_time_s: f64,
    kkt_residual: f64,
}

impl From<SolveResult> for SolveReport {
    fn from(r: SolveResult) -> Self {
        Self {
            alpha: r.alpha,
            objective: r.trace.objective_per_iter,
            iterations: r.trace.iterations_run,
            converged: r.trace.converged,
            wall_time_s: r.trace.wall_time_seconds,
            kkt_residual: r.trace.kkt_residual_final,
        }
    }
}

impl From<SolveReport> for SolveResult {
    fn from(r: SolveReport) -> Self {
        let per_iteration_seconds = if r.iterations > 0 {
            r.wall_time_s / r.iterations as f64
        } else {
            0.0
        };
        Self {
            alpha: r.alpha,
            trace: SolverTrace {
                objective_per_iter: r.objective,
                iterations_run: r.iterations,
                converged: r.converged,
                wall_time_seconds: r.wall_time_s,
                per_iteration_seconds,
                kkt_residual_final: r.kkt_residual,
            },
        }
    }
}

/// Relative objective change used as the stopping rule.
pub(crate) fn relative_change(current: f64, previous: f64) -> f64 {
    (current - previous).abs() / previous.max(1e-12)
}
