//! Dense synthesis operator and the forward distortion models.

mod dictionary;
mod distortion;
pub mod io;

pub use dictionary::{
    Dictionary, PowerIteration, DEFAULT_POWER_MAX_ITER, DEFAULT_POWER_TOL, LIPSCHITZ_SAFETY,
};
pub(crate) use dictionary::GramFactor;
pub use distortion::{clip, midriser_delta, quantize_midriser, DistortionSpec, MAX_BITS};
