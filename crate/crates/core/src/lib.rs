//! Recovery of sparse signals from clipped or quantized measurements.
//!
//! The observation `y = f(x)` of a signal `x = D·α` is turned into a box of
//! consistent signals (the pre-image of `y` under the distortion). Recovery
//! minimizes
//!
//! ```text
//!     ½·dist(D·α, box)² + λ·‖α‖₁
//! ```
//!
//! whose data term is convex with a 1-Lipschitz gradient `x − Π(x)`, so plain
//! ISTA and FISTA apply with step `1/‖DᵀD‖₂`. A constrained ADMM baseline
//! (`min ‖α‖₁ s.t. D·α ∈ box`, with a nested iterative projection) is provided
//! for comparison, together with the synthetic benchmark sweeps.
//!
//! Modules:
//! - [`feasibility`]: interval boxes, projection, squared distance, gradient.
//! - [`operators`]: dense dictionary, Lipschitz estimate, clipper and quantizer.
//! - [`solvers`]: soft-thresholding, ISTA, FISTA, ADMM baseline, diagnostics.
//! - [`experiments`]: seeded data generation, SNR, sweeps and timing tables.

pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod operators;
pub mod solvers;

pub use error::{Error, Result};
pub use feasibility::IntervalSet;
pub use operators::{Dictionary, DistortionSpec};
pub use solvers::{AdmmConfig, SolveResult, SolverConfig, SolverTrace};

pub(crate) mod vecops {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm2(a: &[f64]) -> f64 {
        dot(a, a).sqrt()
    }

    pub fn norm1(a: &[f64]) -> f64 {
        a.iter().map(|v| v.abs()).sum()
    }

    pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}
