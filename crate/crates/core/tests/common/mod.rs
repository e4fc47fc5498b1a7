//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the solvers. The LP and QP oracles are brute force
//! over vertices / active sets and only practical for a handful of rows.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_consist::{Dictionary, IntervalSet};

pub fn to_matrix(d: &Dictionary) -> DMatrix<f64> {
    DMatrix::from_row_slice(d.n(), d.m(), d.as_row_major())
}

/// Largest eigenvalue of `DᵀD` from a full symmetric eigendecomposition.
pub fn gram_max_eigenvalue(d: &Dictionary) -> f64 {
    let a = to_matrix(d);
    let gram = a.transpose() * &a;
    gram.symmetric_eigen().eigenvalues.max()
}

pub fn random_dictionary(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Dictionary {
    let data = (0..n * m).map(|_| rng.random_range(-1.0..1.0)).collect();
    Dictionary::from_row_major(n, m, data).unwrap()
}

/// Box mixing exact, one-sided, two-sided and unbounded samples.
pub fn random_box(rng: &mut ChaCha8Rng, n: usize) -> IntervalSet {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let c: f64 = rng.random_range(-1.0..1.0);
        let w: f64 = rng.random_range(0.0..0.5);
        let (l, u) = match rng.random_range(0..5u32) {
            0 => (c, c),
            1 => (c, f64::INFINITY),
            2 => (f64::NEG_INFINITY, c),
            3 => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (c - w, c + w),
        };
        lower.push(l);
        upper.push(u);
    }
    IntervalSet::new(lower, upper).unwrap()
}

/// Tiny clipped or quantized instance: `(D, box)` with a consistent sparse
/// ground truth, so the constrained problem is feasible.
pub fn tiny_observed_instance(seed: u64, n: usize, m: usize) -> (Dictionary, IntervalSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_dictionary(&mut rng, n, m);
    let mut alpha = vec![0.0; m];
    for _ in 0..2 {
        alpha[rng.random_range(0..m)] = rng.random_range(-1.0..1.0);
    }
    let mut x = d.synthesize(&alpha).unwrap();
    let peak = x.iter().fold(0.0f64, |p, v| p.max(v.abs())).max(1e-3);
    x.iter_mut().for_each(|v| *v /= peak);
    let set = if seed.is_multiple_of(2) {
        let theta = 0.5;
        let y: Vec<f64> = x.iter().map(|v| v.clamp(-theta, theta)).collect();
        IntervalSet::from_clipping(&y, theta, -theta).unwrap()
    } else {
        let delta = 0.25;
        let y: Vec<f64> = x
            .iter()
            .map(|v| (delta * ((v / delta).floor() + 0.5)).clamp(-1.0 + delta / 2.0, 1.0 - delta / 2.0))
            .collect();
        IntervalSet::from_quantization(&y, delta, 1.0).unwrap()
    };
    (d, set)
}

/// `½·dist(D·α, box)²` evaluated directly.
pub fn half_dist_sq(d: &DMatrix<f64>, set: &IntervalSet, alpha: &[f64]) -> f64 {
    let x = d * DVector::from_column_slice(alpha);
    let mut acc = 0.0;
    for i in 0..x.len() {
        let p = x[i].max(set.lower()[i]).min(set.upper()[i]);
        acc += (x[i] - p) * (x[i] - p);
    }
    0.5 * acc
}

/// Central finite-difference gradient of `½·dist(D·α, box)²`.
pub fn finite_difference_gradient(d: &Dictionary, set: &IntervalSet, alpha: &[f64], h: f64) -> Vec<f64> {
    let a = to_matrix(d);
    (0..alpha.len())
        .map(|j| {
            let mut plus = alpha.to_vec();
            let mut minus = alpha.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (half_dist_sq(&a, set, &plus) - half_dist_sq(&a, set, &minus)) / (2.0 * h)
        })
        .collect()
}

/// `min ‖α‖₁ s.t. l ≤ D·α ≤ u` by enumerating the vertices of
/// `{(α, s) : −s ≤ α ≤ s, l ≤ D·α ≤ u}`. Returns `None` when no vertex is
/// feasible.
pub fn lp_min_l1(d: &Dictionary, set: &IntervalSet) -> Option<f64> {
    let (n, m) = (d.n(), d.m());
    let dim = 2 * m;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..m {
        let mut r = vec![0.0; dim];
        r[i] = 1.0;
        r[m + i] = -1.0;
        rows.push((r, 0.0));
        let mut r = vec![0.0; dim];
        r[i] = -1.0;
        r[m + i] = -1.0;
        rows.push((r, 0.0));
    }
    for j in 0..n {
        if set.upper()[j].is_finite() {
            let mut r = vec![0.0; dim];
            r[..m].copy_from_slice(d.row(j));
            rows.push((r, set.upper()[j]));
        }
        if set.lower()[j].is_finite() {
            let mut r = vec![0.0; dim];
            for (k, v) in d.row(j).iter().enumerate() {
                r[k] = -v;
            }
            rows.push((r, -set.lower()[j]));
        }
    }

    let feasible = |z: &DVector<f64>| rows.iter().all(|(r, b)| dot(r, z.as_slice()) <= b + 1e-9);
    let mut best: Option<f64> = None;
    for_each_combination(rows.len(), dim, |chosen| {
        let a = DMatrix::from_fn(dim, dim, |i, k| rows[chosen[i]].0[k]);
        let b = DVector::from_fn(dim, |i, _| rows[chosen[i]].1);
        let lu = a.full_piv_lu();
        if !lu.is_invertible() {
            return;
        }
        if let Some(z) = lu.solve(&b) {
            if feasible(&z) {
                let value: f64 = z.as_slice()[m..].iter().sum();
                best = Some(best.map_or(value, |v| v.min(value)));
            }
        }
    });
    best
}

/// `argmin_α ‖u − α‖² s.t. l ≤ D·α ≤ u` by enumerating which rows sit on
/// which bound. Each active set gives a linear KKT system; the best feasible
/// candidate is the projection.
pub fn qp_nested_projection(d: &Dictionary, u: &[f64], set: &IntervalSet) -> Vec<f64> {
    let a = to_matrix(d);
    let uv = DVector::from_column_slice(u);
    let n = d.n();
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut state = vec![0u8; n];
    loop {
        let active: Vec<(usize, f64)> = state
            .iter()
            .enumerate()
            .filter_map(|(j, &s)| match s {
                1 => Some((j, set.lower()[j])),
                2 => Some((j, set.upper()[j])),
                _ => None,
            })
            .collect();
        let usable = active.iter().all(|(_, b)| b.is_finite())
            && !(0..n).any(|j| state[j] == 2 && set.lower()[j] == set.upper()[j]);
        if usable {
            let candidate = if active.is_empty() {
                Some(uv.clone())
            } else {
                let da = DMatrix::from_fn(active.len(), d.m(), |r, c| a[(active[r].0, c)]);
                let rhs = &da * &uv - DVector::from_iterator(active.len(), active.iter().map(|(_, b)| *b));
                (&da * da.transpose()).lu().solve(&rhs).map(|nu| &uv - da.transpose() * nu)
            };
            if let Some(alpha) = candidate {
                if set.contains((&a * &alpha).as_slice(), 1e-9).unwrap() {
                    let cost = (&uv - &alpha).norm_squared();
                    if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                        best = Some((cost, alpha));
                    }
                }
            }
        }
        // Next assignment in base 3.
        let mut k = 0;
        while k < n && state[k] == 2 {
            state[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        state[k] += 1;
    }
    best.expect("feasible box").1.as_slice().to_vec()
}

/// BPDN `min ½‖D·α − x‖² + λ‖α‖₁` by FISTA, written against the explicit
/// residual `D·α − x`. The synthesis of the extrapolated point is carried
/// along as a linear combination, matching the library's arithmetic.
pub struct BpdnRun {
    pub iterates: Vec<Vec<f64>>,
    pub objectives: Vec<f64>,
}

pub fn bpdn_fista(d: &Dictionary, x: &[f64], lambda: f64, mu: f64, max_iter: usize, rel_tol: f64) -> BpdnRun {
    let m = d.m();
    let soft = |v: f64, r: f64| {
        if v > r {
            v - r
        } else if v < -r {
            v + r
        } else {
            0.0
        }
    };
    let objective = |dx: &[f64], alpha: &[f64]| {
        let fit: f64 = dx.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        0.5 * fit + lambda * alpha.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut alpha_prev = vec![0.0; m];
    let mut u = alpha_prev.clone();
    let mut dx_prev = d.synthesize(&alpha_prev).unwrap();
    let mut du = dx_prev.clone();
    let mut previous = objective(&dx_prev, &alpha_prev);
    let mut t: f64 = 1.0;
    let mut small_before = false;
    let mut iterates = Vec::new();
    let mut objectives = Vec::new();
    for _ in 0..max_iter {
        let resid: Vec<f64> = du.iter().zip(x).map(|(a, b)| a - b).collect();
        let grad = d.correlate(&resid).unwrap();
        let alpha: Vec<f64> = u.iter().zip(&grad).map(|(ui, g)| soft(ui - mu * g, mu * lambda)).collect();
        let dx = d.synthesize(&alpha).unwrap();
        let current = objective(&dx, &alpha);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let w = (t - 1.0) / t_next;
        u = alpha.iter().zip(&alpha_prev).map(|(a, p)| a + w * (a - p)).collect();
        du = dx.iter().zip(&dx_prev).map(|(a, p)| a + w * (a - p)).collect();
        t = t_next;
        iterates.push(alpha.clone());
        objectives.push(current);
        alpha_prev = alpha;
        dx_prev = dx;
        let small = (current - previous).abs() / previous.max(1e-12) < rel_tol;
        if small && small_before {
            break;
        }
        small_before = small;
        previous = current;
    }
    BpdnRun { iterates, objectives }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
