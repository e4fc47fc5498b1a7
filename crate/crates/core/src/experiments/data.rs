use super::rng::{ExperimentRng, STREAM_DICTIONARY, STREAM_SIGNAL};
use crate::error::{Error, Result};
use crate::operators::Dictionary;

/// Sparse code and its normalized synthesis, `x = D·α` with `‖x‖_∞ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
}

/// `n × m` dictionary with i.i.d. standard normal entries (no column
/// normalization).
pub fn gen_dictionary(seed: u64, n: usize, m: usize) -> Result<Dictionary> {
    let mut rng = ExperimentRng::new(seed, STREAM_DICTIONARY);
    let data = (0..n * m).map(|_| rng.standard_normal()).collect();
    Dictionary::from_row_major(n, m, data)
}

const MAX_SIGNAL_DRAWS: usize = 1000;

/// `k_sparse`-sparse code with a uniformly drawn support and standard normal
/// amplitudes, scaled so that its synthesis has unit peak amplitude.
pub fn gen_sparse_signal(seed: u64, dict: &Dictionary, k_sparse: usize) -> Result<SparseSignal> {
    let m = dict.m();
    if k_sparse == 0 || k_sparse > m {
        return Err(Error::InvalidArgument(format!(
            "sparsity must be in 1..={m} (got {k_sparse})"
        )));
    }
    let mut rng = ExperimentRng::new(seed, STREAM_SIGNAL);
    for _ in 0..MAX_SIGNAL_DRAWS {
        let mut alpha = vec![0.0; m];
        let mut exact_zero = false;
        for i in rng.sample_indices(m, k_sparse) {
            alpha[i] = rng.standard_normal();
            exact_zero |= alpha[i] == 0.0;
        }
        let mut x = dict.synthesize(&alpha)?;
        let peak = x.iter().fold(0.0f64, |p, v| p.max(v.abs()));
        if peak == 0.0 || exact_zero {
            continue;
        }
        for v in &mut x {
            *v /= peak;
        }
        for a in &mut alpha {
            *a /= peak;
        }
        return Ok(SparseSignal { alpha, x });
    }
    Err(Error::InvalidArgument(
        "could not draw a sparse signal with non-zero synthesis".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::norm2;

    #[test]
    fn dictionary_is_deterministic() {
        assert_eq!(gen_dictionary(5, 8, 12).unwrap(), gen_dictionary(5, 8, 12).unwrap());
        assert_ne!(gen_dictionary(5, 8, 12).unwrap(), gen_dictionary(6, 8, 12).unwrap());
    }

    #[test]
    fn dictionary_entry_statistics() {
        let d = gen_dictionary(0, 256, 512).unwrap();
        let v = d.as_row_major();
        let count = v.len() as f64;
        let mean = v.iter().sum::<f64>() / count;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((0.98..1.02).contains(&var), "variance {var}");
    }

    #[test]
    fn signal_contract() {
        let d = gen_dictionary(1, 64, 128).unwrap();
        for seed in 0..10 {
            let s = gen_sparse_signal(seed, &d, 6).unwrap();
            let peak = s.x.iter().fold(0.0f64, |p, v| p.max(v.abs()));
            assert_eq!(peak, 1.0);
            assert_eq!(s.alpha.iter().filter(|a| **a != 0.0).count(), 6);
            let dx = d.synthesize(&s.alpha).unwrap();
            let err: Vec<f64> = dx.iter().zip(&s.x).map(|(a, b)| a - b).collect();
            assert!(norm2(&err) <= 1e-12 * norm2(&s.x));
        }
        assert_eq!(gen_sparse_signal(3, &d, 6).unwrap(), gen_sparse_signal(3, &d, 6).unwrap());
        assert!(gen_sparse_signal(0, &d, 0).is_err());
        assert!(gen_sparse_signal(0, &d, 129).is_err());
    }

    #[test]
    fn zero_synthesis_is_redrawn() {
        // Only the last atom is non-zero; draws that miss it are rejected.
        let mut data = vec![0.0; 2 * 4];
        data[3] = 1.0;
        data[7] = -2.0;
        let d = Dictionary::from_row_major(2, 4, data).unwrap();
        let s = gen_sparse_signal(0, &d, 1).unwrap();
        assert!(s.alpha[3] != 0.0);
        assert_eq!(s.x.iter().fold(0.0f64, |p, v| p.max(v.abs())), 1.0);
    }
}
