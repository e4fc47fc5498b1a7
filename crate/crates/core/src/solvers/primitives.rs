use crate::error::{check_len, Error, Result};
use crate::feasibility::IntervalSet;
use crate::operators::Dictionary;
use crate::vecops::norm1;

/// Soft-thresholding `S_ρ(v)_i = max(|v_i| − ρ, 0)·sign(v_i)`, with
/// `S_ρ(0) = 0`.
pub fn soft_threshold(rho: f64, v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    soft_threshold_in_place(rho, &mut out);
    out
}

pub fn soft_threshold_in_place(rho: f64, v: &mut [f64]) {
    for x in v {
        *x = shrink(*x, rho);
    }
}

#[inline]
pub(crate) fn shrink(x: f64, rho: f64) -> f64 {
    if x > rho {
        x - rho
    } else if x < -rho {
        x + rho
    } else {
        0.0
    }
}

fn check_dims(dict: &Dictionary, alpha: &[f64], set: &IntervalSet) -> Result<()> {
    check_len(dict.m(), alpha.len())?;
    check_len(dict.n(), set.len())
}

/// Relaxed objective `½·dist(D·α, C)² + λ‖α‖₁`.
pub fn objective(dict: &Dictionary, alpha: &[f64], set: &IntervalSet, lambda: f64) -> Result<f64> {
    check_dims(dict, alpha, set)?;
    let dx = dict.synthesize(alpha)?;
    Ok(0.5 * set.distance_sq_unchecked(&dx) + lambda * norm1(alpha))
}

/// One proximal-gradient step
/// `S_{μλ}(α − μ·Dᵀ(D·α − Π_C(D·α)))`.
pub fn ista_step(
    dict: &Dictionary,
    alpha: &[f64],
    set: &IntervalSet,
    mu: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    check_dims(dict, alpha, set)?;
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive (got {mu})")));
    }
    let grad = data_gradient(dict, alpha, set);
    let threshold = mu * lambda;
    Ok(alpha
        .iter()
        .zip(&grad)
        .map(|(a, g)| shrink(a - mu * g, threshold))
        .collect())
}

/// `Dᵀ(D·α − Π_C(D·α))`, unchecked.
pub(crate) fn data_gradient(dict: &Dictionary, alpha: &[f64], set: &IntervalSet) -> Vec<f64> {
    let mut dx = vec![0.0; dict.n()];
    dict.synthesize_into(alpha, &mut dx);
    let mut resid = vec![0.0; dict.n()];
    set.residual_into(&dx, &mut resid);
    let mut grad = vec![0.0; dict.m()];
    dict.correlate_into(&resid, &mut grad);
    grad
}

/// First-order optimality violation of the relaxed ℓ1 problem.
///
/// With `g = Dᵀ(D·α − Π(D·α))`, returns the largest of `|g_i + λ·sign(α_i)|`
/// over the support and `max(0, |g_i| − λ)` off the support.
pub fn kkt_residual(dict: &Dictionary, alpha: &[f64], set: &IntervalSet, lambda: f64) -> Result<f64> {
    check_dims(dict, alpha, set)?;
    let grad = data_gradient(dict, alpha, set);
    Ok(alpha
        .iter()
        .zip(&grad)
        .map(|(&a, &g)| {
            if a > 0.0 {
                (g + lambda).abs()
            } else if a < 0.0 {
                (g - lambda).abs()
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max))
}

/// Momentum sequence `t_{k+1} = (1 + √(1 + 4t_k²)) / 2`.
pub fn fista_momentum(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}
