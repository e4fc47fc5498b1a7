//! Constrained baseline: `min ‖α‖₁ s.t. D·α ∈ C`.
//!
//! Outer ADMM splits `α = β` with `α` carrying the ℓ1 term and `β` the
//! constraint. The `β`-update is the non-orthogonal projection
//!
//! ```text
//!     argmin_β ‖u − β‖² + 𝟙_C(D·β)
//! ```
//!
//! which has no closed form for a general `D` and is itself solved by an
//! inner ADMM on the split `z = D·β`, using a Cholesky factor of
//! `I + ρ·DᵀD` that the dictionary caches.

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use super::primitives::shrink;
use super::{SolveResult, SolverTrace};
use crate::error::{check_len, Error, Result};
use crate::feasibility::IntervalSet;
use crate::operators::{Dictionary, GramFactor};
use crate::vecops::{dist2, norm1, norm2};

/// Inner projections whose primal residual stays above this are reported
/// as failures by [`inner_projection`].
pub const INNER_FAILURE_RESIDUAL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    pub rho_outer: f64,
    pub rho_inner: f64,
    pub inner_iters: usize,
    pub inner_tol: f64,
    pub max_iter: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho_outer: 1.0,
            rho_inner: 1.0,
            inner_iters: 50,
            inner_tol: 1e-8,
            max_iter: 400,
            abs_tol: 1e-6,
            rel_tol: 1e-6,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho_outer", self.rho_outer),
            ("rho_inner", self.rho_inner),
            ("inner_tol", self.inner_tol),
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive (got {v})")));
            }
        }
        if self.inner_iters == 0 || self.max_iter == 0 {
            return Err(Error::InvalidArgument("iteration budgets must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of one nested projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOutcome {
    pub iterations: usize,
    /// `‖D·β − z‖₂` at exit.
    pub primal_residual: f64,
}

/// Inner ADMM solver for `argmin_β ‖u − β‖² + 𝟙_C(D·β)`.
///
/// Keeps its split variable `z` and scaled dual `w` between calls so that
/// successive projections of nearby points start warm.
pub struct NestedProjector<'a> {
    dict: &'a Dictionary,
    set: &'a IntervalSet,
    factor: Arc<GramFactor>,
    iters: usize,
    tol: f64,
    z: Vec<f64>,
    w: Vec<f64>,
    warm: bool,
    rhs: DVector<f64>,
    scratch_n: Vec<f64>,
    scratch_m: Vec<f64>,
    dx: Vec<f64>,
}

impl<'a> NestedProjector<'a> {
    pub fn new(dict: &'a Dictionary, set: &'a IntervalSet, cfg: &AdmmConfig) -> Result<Self> {
        cfg.validate()?;
        check_len(dict.n(), set.len())?;
        Ok(Self {
            dict,
            set,
            factor: dict.regularized_gram_factor(cfg.rho_inner),
            iters: cfg.inner_iters,
            tol: cfg.inner_tol,
            z: vec![0.0; dict.n()],
            w: vec![0.0; dict.n()],
            warm: false,
            rhs: DVector::zeros(dict.m()),
            scratch_n: vec![0.0; dict.n()],
            scratch_m: vec![0.0; dict.m()],
            dx: vec![0.0; dict.n()],
        })
    }

    /// Discards the warm-start state.
    pub fn reset(&mut self) {
        self.warm = false;
    }

    /// Projects `u`, writing the result into `out`.
    pub fn project_into(&mut self, u: &[f64], out: &mut [f64]) -> Result<ProjectionOutcome> {
        check_len(self.dict.m(), u.len())?;
        check_len(self.dict.m(), out.len())?;
        let rho = self.factor.rho;

        if !self.warm {
            self.dict.synthesize_into(u, &mut self.dx);
            self.set.project_into(&self.dx, &mut self.z);
            self.w.fill(0.0);
            self.warm = true;
        }

        let mut outcome = ProjectionOutcome {
            iterations: 0,
            primal_residual: f64::INFINITY,
        };
        for it in 1..=self.iters {
            // (I + ρDᵀD)β = u + ρDᵀ(z − w)
            for ((s, &z), &w) in self.scratch_n.iter_mut().zip(&self.z).zip(&self.w) {
                *s = z - w;
            }
            self.dict.correlate_into(&self.scratch_n, &mut self.scratch_m);
            for ((r, &ui), &c) in self.rhs.iter_mut().zip(u).zip(&self.scratch_m) {
                *r = ui + rho * c;
            }
            self.factor.solve_in_place(&mut self.rhs);
            out.copy_from_slice(self.rhs.as_slice());

            self.dict.synthesize_into(out, &mut self.dx);
            let mut primal = 0.0;
            let mut dual = 0.0;
            for i in 0..self.z.len() {
                let shifted = self.dx[i] + self.w[i];
                let lo = self.set.lower()[i];
                let hi = self.set.upper()[i];
                let z_new = shifted.max(lo).min(hi);
                dual += (z_new - self.z[i]) * (z_new - self.z[i]);
                primal += (self.dx[i] - z_new) * (self.dx[i] - z_new);
                self.z[i] = z_new;
                self.w[i] = shifted - z_new;
            }
            let primal = primal.sqrt();
            let dual = rho * dual.sqrt();
            outcome = ProjectionOutcome {
                iterations: it,
                primal_residual: primal,
            };
            if primal < self.tol && dual < self.tol {
                break;
            }
        }
        Ok(outcome)
    }
}

/// One cold-started nested projection
/// `argmin_β ‖u − β‖² + 𝟙_C(D·β)`.
///
/// Fails with [`Error::ProjectionNotConverged`] when the primal residual is
/// still above 1e−3 after `inner_iters` iterations.
pub fn inner_projection(
    dict: &Dictionary,
    u: &[f64],
    set: &IntervalSet,
    cfg: &AdmmConfig,
) -> Result<Vec<f64>> {
    let mut projector = NestedProjector::new(dict, set, cfg)?;
    let mut out = vec![0.0; dict.m()];
    let outcome = projector.project_into(u, &mut out)?;
    if outcome.primal_residual > INNER_FAILURE_RESIDUAL {
        return Err(Error::ProjectionNotConverged {
            residual: outcome.primal_residual,
        });
    }
    Ok(out)
}

/// ADMM on `min ‖α‖₁ + 𝟙_C(D·β) s.t. α = β`.
///
/// Returns the final `β`, whose synthesis is feasible up to the inner
/// tolerance. The trace records `‖α_k‖₁` per iteration. Stopping uses the
/// usual primal/dual residual test with `√M·abs_tol + rel_tol·scale`.
/// Non-convergence is reported through `trace.converged`, never as an error.
pub fn solve_admm_constrained(
    dict: &Dictionary,
    set: &IntervalSet,
    cfg: &AdmmConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    check_len(dict.n(), set.len())?;
    let m = dict.m();
    let rho = cfg.rho_outer;
    let sqrt_m = (m as f64).sqrt();

    let start = Instant::now();
    let mut projector = NestedProjector::new(dict, set, cfg)?;
    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; m];
    let mut beta_prev = vec![0.0; m];
    let mut v = vec![0.0; m];
    let mut target = vec![0.0; m];
    let mut trace = SolverTrace::default();
    let mut primal = f64::INFINITY;

    for _ in 0..cfg.max_iter {
        for ((a, &b), &vi) in alpha.iter_mut().zip(&beta).zip(&v) {
            *a = shrink(b - vi, 1.0 / rho);
        }
        beta_prev.copy_from_slice(&beta);
        for ((t, &a), &vi) in target.iter_mut().zip(&alpha).zip(&v) {
            *t = a + vi;
        }
        projector.project_into(&target, &mut beta)?;
        for ((vi, &a), &b) in v.iter_mut().zip(&alpha).zip(&beta) {
            *vi += a - b;
        }

        primal = dist2(&alpha, &beta);
        let dual = rho * dist2(&beta, &beta_prev);
        trace.objective_per_iter.push(norm1(&alpha));

        let eps_primal = sqrt_m * cfg.abs_tol + cfg.rel_tol * norm2(&alpha).max(norm2(&beta));
        let eps_dual = sqrt_m * cfg.abs_tol + cfg.rel_tol * rho * norm2(&v);
        if primal <= eps_primal && dual <= eps_dual {
            trace.converged = true;
            break;
        }
    }
    trace.finish(start.elapsed().as_secs_f64());
    trace.kkt_residual_final = primal;
    Ok(SolveResult { alpha: beta, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn feasible_point_projects_to_itself() {
        let d = Dictionary::from_rows(&[vec![1.0, 0.5, -0.2], vec![0.3, -1.0, 0.4]]).unwrap();
        let u = [0.2, -0.1, 0.3];
        let du = d.synthesize(&u).unwrap();
        let set = IntervalSet::new(du.iter().map(|v| v - 0.1).collect(), du.iter().map(|v| v + 0.1).collect())
            .unwrap();
        let p = inner_projection(&d, &u, &set, &AdmmConfig::default()).unwrap();
        for (a, b) in p.iter().zip(&u) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonal_dictionary_has_closed_form() {
        // Rotation by 30 degrees in the plane, identity on the third axis.
        let (s, c) = (0.5f64, 3f64.sqrt() / 2.0);
        let d = Dictionary::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let set = IntervalSet::new(vec![0.5, f64::NEG_INFINITY, -0.2], vec![f64::INFINITY, 0.1, -0.2]).unwrap();
        let u = [0.1, 0.7, 0.4];
        let du = d.synthesize(&u).unwrap();
        let pdu = set.project(&du).unwrap();
        let diff: Vec<f64> = pdu.iter().zip(&du).map(|(p, x)| p - x).collect();
        let closed: Vec<f64> = u.iter().zip(d.correlate(&diff).unwrap()).map(|(a, b)| a + b).collect();

        let cfg = AdmmConfig { inner_iters: 2000, inner_tol: 1e-13, ..Default::default() };
        let p = inner_projection(&d, &u, &set, &cfg).unwrap();
        for (a, b) in p.iter().zip(&closed) {
            assert_relative_eq!(*a, *b, epsilon = 1e-8);
        }
    }

    #[test]
    fn zero_singleton_gives_zero_solution() {
        let d = Dictionary::from_rows(&[vec![1.0, 0.5, -0.2, 0.7], vec![0.3, -1.0, 0.4, 0.1]]).unwrap();
        let set = IntervalSet::singleton(&[0.0, 0.0]).unwrap();
        let r = solve_admm_constrained(&d, &set, &AdmmConfig::default()).unwrap();
        assert!(r.trace.converged);
        assert!(norm1(&r.alpha) < 1e-6);
        assert!(r.trace.final_objective().unwrap() < 1e-6);
    }

    #[test]
    fn non_convergence_is_reported() {
        let d = Dictionary::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
        let set = IntervalSet::singleton(&[5.0, -5.0]).unwrap();
        let cfg = AdmmConfig { inner_iters: 1, inner_tol: 1e-12, ..Default::default() };
        assert!(matches!(
            inner_projection(&d, &[0.0, 0.0], &set, &cfg),
            Err(Error::ProjectionNotConverged { .. })
        ));
        let r = solve_admm_constrained(&d, &set, &AdmmConfig { max_iter: 2, ..cfg }).unwrap();
        assert!(!r.trace.converged);
        assert_eq!(r.trace.iterations_run, 2);
    }

    #[test]
    fn config_validation() {
        assert!(AdmmConfig::default().validate().is_ok());
        assert!(AdmmConfig { rho_outer: 0.0, ..Default::default() }.validate().is_err());
        assert!(AdmmConfig { inner_iters: 0, ..Default::default() }.validate().is_err());
        assert!(AdmmConfig { abs_tol: f64::NAN, ..Default::default() }.validate().is_err());
    }
}
