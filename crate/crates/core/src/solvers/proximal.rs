use web_time::Instant;

use super::primitives::{fista_momentum, kkt_residual, shrink};
use super::{relative_change, SolveResult, SolverConfig, SolverTrace};
use crate::error::{check_len, Result};
use crate::feasibility::IntervalSet;
use crate::operators::Dictionary;
use crate::vecops::norm1;

/// Scratch buffers for evaluating the data term.
struct DataTerm<'a> {
    dict: &'a Dictionary,
    set: &'a IntervalSet,
    dx: Vec<f64>,
    resid: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> DataTerm<'a> {
    fn new(dict: &'a Dictionary, set: &'a IntervalSet) -> Self {
        Self {
            dict,
            set,
            dx: vec![0.0; dict.n()],
            resid: vec![0.0; dict.n()],
            grad: vec![0.0; dict.m()],
        }
    }

    /// Sets `dx = D·alpha` and returns the objective there.
    fn objective(&mut self, alpha: &[f64], lambda: f64) -> f64 {
        self.dict.synthesize_into(alpha, &mut self.dx);
        0.5 * self.set.distance_sq_unchecked(&self.dx) + lambda * norm1(alpha)
    }

    /// Gradient at the point whose synthesis is currently in `dx`.
    fn gradient_from_dx(&mut self) -> &[f64] {
        self.set.residual_into(&self.dx, &mut self.resid);
        self.dict.correlate_into(&self.resid, &mut self.grad);
        &self.grad
    }

}

fn prepare(dict: &Dictionary, set: &IntervalSet, config: &SolverConfig) -> Result<f64> {
    check_len(dict.n(), set.len())?;
    config.validate(dict.m())?;
    config.resolve_step(dict)
}

/// ISTA on the relaxed problem: repeated [`ista_step`](super::ista_step)
/// from `α₀` until the relative objective change drops below `rel_tol` or
/// `max_iter` is reached.
pub fn solve_ista(dict: &Dictionary, set: &IntervalSet, config: &SolverConfig) -> Result<SolveResult> {
    let mu = prepare(dict, set, config)?;
    let lambda = config.lambda;
    let threshold = mu * lambda;

    let start = Instant::now();
    let mut term = DataTerm::new(dict, set);
    let mut alpha = config.initial_alpha(dict.m());
    let mut previous = term.objective(&alpha, lambda);
    let mut trace = SolverTrace::default();

    for _ in 0..config.max_iter {
        let grad = term.gradient_from_dx();
        for (a, g) in alpha.iter_mut().zip(grad) {
            *a = shrink(*a - mu * g, threshold);
        }
        let current = term.objective(&alpha, lambda);
        trace.objective_per_iter.push(current);
        if relative_change(current, previous) < config.rel_tol {
            trace.converged = true;
            break;
        }
        previous = current;
    }
    trace.finish(start.elapsed().as_secs_f64());
    trace.kkt_residual_final = kkt_residual(dict, &alpha, set, lambda)?;
    Ok(SolveResult { alpha, trace })
}

/// FISTA on the relaxed problem.
///
/// With `u₁ = α₀` and `t₁ = 1`, each iteration takes a thresholded gradient
/// step at `u_k` to get `α_k`, advances `t`, and extrapolates
/// `u_{k+1} = α_k + ((t_k − 1)/t_{k+1})·(α_k − α_{k−1})`. The objective is
/// evaluated at `α_k`; it is not monotone.
///
/// `D·u_{k+1}` is formed from `D·α_k` and `D·α_{k−1}` by the same linear
/// combination, so an iteration costs two products with `D` like ISTA.
///
/// The relative-change test must hold on two consecutive iterations. A
/// single small change also happens at the turning points of the
/// oscillating objective, well before convergence.
pub fn solve_fista(dict: &Dictionary, set: &IntervalSet, config: &SolverConfig) -> Result<SolveResult> {
    let mu = prepare(dict, set, config)?;
    let lambda = config.lambda;
    let threshold = mu * lambda;

    let start = Instant::now();
    let mut term = DataTerm::new(dict, set);
    let mut alpha_prev = config.initial_alpha(dict.m());
    let mut alpha = alpha_prev.clone();
    let mut u = alpha_prev.clone();
    let mut t: f64 = 1.0;
    let mut previous = term.objective(&alpha_prev, lambda);
    let mut du = term.dx.clone();
    let mut dx_prev = term.dx.clone();
    let mut small_before = false;
    let mut trace = SolverTrace::default();

    for _ in 0..config.max_iter {
        std::mem::swap(&mut term.dx, &mut du);
        let grad = term.gradient_from_dx();
        for ((a, &ui), g) in alpha.iter_mut().zip(&u).zip(grad) {
            *a = shrink(ui - mu * g, threshold);
        }
        let current = term.objective(&alpha, lambda);
        trace.objective_per_iter.push(current);

        let t_next = fista_momentum(t);
        let weight = (t - 1.0) / t_next;
        extrapolate(&mut u, &alpha, &alpha_prev, weight);
        extrapolate(&mut du, &term.dx, &dx_prev, weight);
        t = t_next;
        std::mem::swap(&mut alpha_prev, &mut alpha);
        std::mem::swap(&mut dx_prev, &mut term.dx);

        let small = relative_change(current, previous) < config.rel_tol;
        if small && small_before {
            trace.converged = true;
            break;
        }
        small_before = small;
        previous = current;
    }
    // The last iterate sits in `alpha_prev` after the swap.
    let alpha = alpha_prev;
    trace.finish(start.elapsed().as_secs_f64());
    trace.kkt_residual_final = kkt_residual(dict, &alpha, set, lambda)?;
    Ok(SolveResult { alpha, trace })
}

/// `out = cur + weight·(cur − prev)`.
pub(crate) fn extrapolate(out: &mut [f64], cur: &[f64], prev: &[f64], weight: f64) {
    for ((o, &c), &p) in out.iter_mut().zip(cur).zip(prev) {
        *o = c + weight * (c - p);
    }
}
