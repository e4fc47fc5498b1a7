use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_len, Error, Result};
use crate::vecops::{dot, norm2};

/// Multiplier applied to the power-iteration eigenvalue so that the step
/// `1/L` never exceeds `1/‖DᵀD‖₂` (power iteration approaches from below).
pub const LIPSCHITZ_SAFETY: f64 = 1.01;
pub const DEFAULT_POWER_TOL: f64 = 1e-6;
pub const DEFAULT_POWER_MAX_ITER: usize = 500;

/// Dense `N × M` synthesis operator stored row-major.
///
/// The Lipschitz constant and the `(I + ρ·DᵀD)` factorization used by the
/// ADMM baseline are computed on first use and cached; both caches are
/// write-once so a shared dictionary can be used from several threads.
pub struct Dictionary {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    lipschitz: OnceLock<f64>,
    gram_factor: OnceLock<Arc<GramFactor>>,
}

/// Power-iteration diagnostics for the largest eigenvalue of `DᵀD`.
#[derive(Debug, Clone)]
pub struct PowerIteration {
    /// Final Rayleigh quotient (no safety factor applied).
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Rayleigh quotient after each iteration.
    pub rayleigh_quotients: Vec<f64>,
}

/// Cholesky factor of `I + ρ·DᵀD`.
pub(crate) struct GramFactor {
    pub(crate) rho: f64,
    chol: Cholesky<f64, Dyn>,
}

impl GramFactor {
    pub(crate) fn solve_in_place(&self, rhs: &mut DVector<f64>) {
        self.chol.solve_mut(rhs);
    }
}

impl Dictionary {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "dictionary must be at least 1x1 (got {rows}x{cols})"
            )));
        }
        check_len(rows * cols, data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at ({}, {})",
                i / cols,
                i % cols
            )));
        }
        Ok(Self {
            rows,
            cols,
            data,
            lipschitz: OnceLock::new(),
            gram_factor: OnceLock::new(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for row in rows {
            check_len(m, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, m, data)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_row_major(n, n, data)
    }

    /// Signal dimension N.
    pub fn n(&self) -> usize {
        self.rows
    }

    /// Number of atoms M.
    pub fn m(&self) -> usize {
        self.cols
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `D·α`.
    pub fn synthesize(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, alpha.len())?;
        let mut out = vec![0.0; self.rows];
        self.synthesize_into(alpha, &mut out);
        Ok(out)
    }

    pub(crate) fn synthesize_into(&self, alpha: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = dot(row, alpha);
        }
    }

    /// `Dᵀ·r`.
    pub fn correlate(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        self.correlate_into(r, &mut out);
        Ok(out)
    }

    pub(crate) fn correlate_into(&self, r: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (&ri, row) in r.iter().zip(self.data.chunks_exact(self.cols)) {
            if ri != 0.0 {
                for (o, &d) in out.iter_mut().zip(row) {
                    *o += ri * d;
                }
            }
        }
    }

    /// Power iteration on `DᵀD` from the normalized all-ones vector.
    ///
    /// Stops when the Rayleigh quotient changes by less than `tol` relative,
    /// or after `max_iter` iterations.
    pub fn power_iteration(&self, tol: f64, max_iter: usize) -> Result<PowerIteration> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive (got {tol})")));
        }
        if max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
        }
        if self.data.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroOperator);
        }

        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut dv = vec![0.0; self.rows];
        let mut w = vec![0.0; self.cols];

        self.synthesize_into(&v, &mut dv);
        if norm2(&dv) == 0.0 {
            // All-ones start lies in the null space; restart on the
            // heaviest column instead.
            let j = (0..self.cols)
                .map(|j| (j, self.column(j).iter().map(|x| x * x).sum::<f64>()))
                .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best })
                .0;
            v.fill(0.0);
            v[j] = 1.0;
        }

        let mut quotients = Vec::new();
        let mut previous = 0.0;
        let mut converged = false;
        for k in 0..max_iter {
            self.synthesize_into(&v, &mut dv);
            self.correlate_into(&dv, &mut w);
            let rq = dot(&v, &w);
            quotients.push(rq);
            let wn = norm2(&w);
            if wn == 0.0 {
                return Err(Error::ZeroOperator);
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / wn;
            }
            if k > 0 && (rq - previous).abs() <= tol * rq.abs() {
                converged = true;
                break;
            }
            previous = rq;
        }

        let eigenvalue = *quotients.last().expect("at least one iteration");
        Ok(PowerIteration {
            eigenvalue,
            iterations: quotients.len(),
            converged,
            rayleigh_quotients: quotients,
        })
    }

    /// Lipschitz constant `L ≈ 1.01·‖DᵀD‖₂` of the data-term gradient.
    ///
    /// The first successful estimate is cached; later calls to this method
    /// recompute with the given parameters but leave the cache as it was.
    pub fn estimate_lipschitz(&self, tol: f64, max_iter: usize) -> Result<f64> {
        let estimate = LIPSCHITZ_SAFETY * self.power_iteration(tol, max_iter)?.eigenvalue;
        let _ = self.lipschitz.set(estimate);
        Ok(estimate)
    }

    /// Cached Lipschitz constant, computed with the default power-iteration
    /// settings on first use.
    pub fn lipschitz(&self) -> Result<f64> {
        if let Some(&l) = self.lipschitz.get() {
            return Ok(l);
        }
        self.estimate_lipschitz(DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER)
    }

    pub fn cached_lipschitz(&self) -> Option<f64> {
        self.lipschitz.get().copied()
    }

    /// Factor of `I + ρ·DᵀD`, cached for the first `ρ` requested.
    pub(crate) fn regularized_gram_factor(&self, rho: f64) -> Arc<GramFactor> {
        if let Some(f) = self.gram_factor.get() {
            if f.rho == rho {
                return Arc::clone(f);
            }
            return Arc::new(self.factor_gram(rho));
        }
        let f = self.gram_factor.get_or_init(|| Arc::new(self.factor_gram(rho)));
        if f.rho == rho {
            Arc::clone(f)
        } else {
            Arc::new(self.factor_gram(rho))
        }
    }

    fn factor_gram(&self, rho: f64) -> GramFactor {
        let d = DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let mut system = d.tr_mul(&d) * rho;
        for j in 0..self.cols {
            system[(j, j)] += 1.0;
        }
        let chol = Cholesky::new(system).expect("I + rho*D^T*D is positive definite for rho > 0");
        GramFactor { rho, chol }
    }
}

impl Clone for Dictionary {
    fn clone(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            lipschitz: self.lipschitz.clone(),
            gram_factor: self.gram_factor.clone(),
        }
    }
}

impl fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dictionary")
            .field("n", &self.rows)
            .field("m", &self.cols)
            .field("lipschitz", &self.lipschitz.get())
            .finish_non_exhaustive()
    }
}

impl PartialEq for Dictionary {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}
