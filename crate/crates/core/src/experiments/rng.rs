//! Reproducible random numbers for the synthetic experiments.
//!
//! - Generator: ChaCha8 from `rand_chacha` 0.9 (version pinned by the
//!   lockfile), seeded with `seed_from_u64`. Independent streams of the same
//!   seed are selected with `set_stream`, which is how dictionary and signal
//!   draws are split.
//! - Uniforms: 53-bit `f64` in `[0, 1)`.
//! - Normals: Box–Muller, both outputs used, transcendental functions taken
//!   from `libm` so results do not depend on the platform's math library.
//! - Integer ranges are drawn as `u64` so 32- and 64-bit targets agree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator and variate algorithms; bump when any of
/// them changes.
pub const RNG_ALGORITHM: &str = "chacha8/rand_chacha-0.9/box-muller-libm/v1";

pub const STREAM_DICTIONARY: u64 = 0;
pub const STREAM_SIGNAL: u64 = 1;

pub struct ExperimentRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl ExperimentRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            inner,
            spare_normal: None,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.random_range(0..n)
    }

    /// `k` distinct indices from `0..m`, uniformly, returned in ascending
    /// order (partial Fisher–Yates).
    pub fn sample_indices(&mut self, m: usize, k: usize) -> Vec<usize> {
        assert!(k <= m, "cannot draw {k} distinct indices from {m}");
        let mut pool: Vec<usize> = (0..m).collect();
        for i in 0..k {
            let j = i + self.below((m - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut picked = pool[..k].to_vec();
        picked.sort_unstable();
        picked
    }
}
