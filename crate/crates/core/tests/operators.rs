mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparse_consist::experiments::{gen_dictionary, gen_sparse_signal};
use sparse_consist::operators::io;
use sparse_consist::{Dictionary, DistortionSpec};

#[test]
fn power_iteration_matches_eigendecomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (n, m) in [(3, 5), (16, 32), (40, 20)] {
        let d = random_dictionary(&mut rng, n, m);
        let est = d.power_iteration(1e-12, 10_000).unwrap();
        let exact = gram_max_eigenvalue(&d);
        assert!((est.eigenvalue - exact).abs() <= 1e-4 * exact, "{} vs {exact}", est.eigenvalue);
        let l = d.lipschitz().unwrap();
        assert!(l >= exact);
    }
}

#[test]
fn lipschitz_at_benchmark_scale() {
    let d = gen_dictionary(0, 256, 512).unwrap();
    let exact = gram_max_eigenvalue(&d);
    let l = d.lipschitz().unwrap();
    assert!(l >= exact, "{l} < {exact}");
    assert!(l <= 1.011 * exact);
    let est = d.power_iteration(1e-12, 20_000).unwrap();
    assert!((est.eigenvalue - exact).abs() <= 1e-4 * exact);
}

#[test]
fn dictionary_files_round_trip() {
    let d = gen_dictionary(9, 7, 11).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for name in ["dict.bin", "dict.csv"] {
        let path = dir.path().join(name);
        io::save_dictionary(&d, &path).unwrap();
        let back: Dictionary = io::load_dictionary(&path).unwrap();
        assert_eq!(back, d, "{name}");
    }
}

#[test]
fn truncated_binary_is_rejected() {
    let d = gen_dictionary(9, 4, 4).unwrap();
    let mut bytes = Vec::new();
    io::write_dictionary_binary(&d, &mut bytes).unwrap();
    bytes.truncate(bytes.len() - 3);
    assert!(io::read_dictionary_binary(&mut bytes.as_slice()).is_err());
}

#[test]
fn observations_are_consistent_with_their_preimage() {
    let d = gen_dictionary(4, 64, 128).unwrap();
    for seed in 0..10 {
        let x = gen_sparse_signal(seed, &d, 8).unwrap().x;
        for spec in ["clip:0.3", "clip:0.7:-0.2", "quant:2", "quant:5", "none"] {
            let spec: DistortionSpec = spec.parse().unwrap();
            let y = spec.apply(&x);
            let set = spec.feasibility_set(&y).unwrap();
            assert!(set.contains(&x, 1e-12).unwrap(), "{spec}");
            // Interior members of the box distort back to the observation.
            let p: Vec<f64> = set
                .lower()
                .iter()
                .zip(set.upper())
                .map(|(&l, &u)| match (l.is_finite(), u.is_finite()) {
                    (true, true) => 0.5 * (l + u),
                    (true, false) => l + 0.5,
                    (false, true) => u - 0.5,
                    (false, false) => 0.0,
                })
                .collect();
            assert_eq!(spec.apply(&p), y, "{spec}");
        }
    }
}
