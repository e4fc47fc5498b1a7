//! Synthetic benchmark: random Gaussian dictionaries, sparse codes with unit
//! peak synthesis, clipping and quantization sweeps, SNR and timing.

mod data;
pub mod rng;
mod sweep;

pub use data::{gen_dictionary, gen_sparse_signal, SparseSignal};
pub use sweep::{
    bit_grid, clip_grid, run_experiment, run_timing_table, AggregateResult, ExperimentSpec, InputPoint,
    PointResult, SolverKind, TimingRow, TimingTable, DEFAULT_BIT_DEPTHS, DEFAULT_CLIP_LEVELS,
    RESULTS_CSV_HEADER,
};

use crate::error::{check_len, Error, Result};
use crate::vecops::{dist2, norm2};

/// Ceiling returned when the reconstruction error vanishes.
pub const SNR_CAP_DB: f64 = 300.0;

/// `20·log10(‖reference‖₂ / ‖reference − estimate‖₂)`, capped at 300 dB.
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let signal = norm2(reference);
    if signal == 0.0 {
        return Err(Error::InvalidArgument("SNR of a zero reference is undefined".into()));
    }
    let error = dist2(reference, estimate);
    if error == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((20.0 * (signal / error).log10()).min(SNR_CAP_DB))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn snr_examples() {
        let x = [3.0, 4.0];
        assert_eq!(snr_db(&x, &x).unwrap(), 300.0);
        assert_relative_eq!(snr_db(&x, &[0.0, 0.0]).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(snr_db(&x, &[3.3, 4.4]).unwrap(), 20.0, epsilon = 1e-9);
        assert_eq!(snr_db(&x, &[3.0, 4.0 + 1e-300]).unwrap(), 300.0);
        assert!(snr_db(&[0.0, 0.0], &x).is_err());
        assert!(snr_db(&x, &[1.0]).is_err());
    }
}
