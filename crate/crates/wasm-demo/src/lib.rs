//! Browser bindings for a small interactive version of the recovery demo.
//!
//! Three entry points back the page in `www/`: recover one clipped signal,
//! recover one quantized signal, and sweep SNR over a grid of distortion
//! levels. Sizes are kept small so each call returns in well under a second.

use sparse_consist::experiments::{
    gen_dictionary, gen_sparse_signal, run_experiment, snr_db, ExperimentSpec, SolverKind,
};
use sparse_consist::solvers::{solve_fista, solve_ista, SolverConfig};
use sparse_consist::DistortionSpec;
use wasm_bindgen::prelude::*;

const N: usize = 64;
const M: usize = 128;
const K: usize = 4;

/// One recovered signal with both solvers.
#[wasm_bindgen]
pub struct Recovery {
    clean: Vec<f64>,
    observed: Vec<f64>,
    ista: Vec<f64>,
    fista: Vec<f64>,
    ista_objective: Vec<f64>,
    fista_objective: Vec<f64>,
    input_snr: f64,
    ista_snr: f64,
    fista_snr: f64,
}

#[wasm_bindgen]
impl Recovery {
    #[wasm_bindgen(getter)]
    pub fn clean(&self) -> Vec<f64> {
        self.clean.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn observed(&self) -> Vec<f64> {
        self.observed.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn ista(&self) -> Vec<f64> {
        self.ista.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn fista(&self) -> Vec<f64> {
        self.fista.clone()
    }
    #[wasm_bindgen(getter, js_name = istaObjective)]
    pub fn ista_objective(&self) -> Vec<f64> {
        self.ista_objective.clone()
    }
    #[wasm_bindgen(getter, js_name = fistaObjective)]
    pub fn fista_objective(&self) -> Vec<f64> {
        self.fista_objective.clone()
    }
    #[wasm_bindgen(getter, js_name = inputSnr)]
    pub fn input_snr(&self) -> f64 {
        self.input_snr
    }
    #[wasm_bindgen(getter, js_name = istaSnr)]
    pub fn ista_snr(&self) -> f64 {
        self.ista_snr
    }
    #[wasm_bindgen(getter, js_name = fistaSnr)]
    pub fn fista_snr(&self) -> f64 {
        self.fista_snr
    }
}

/// Mean SNR per grid point.
#[wasm_bindgen]
pub struct Sweep {
    levels: Vec<f64>,
    input: Vec<f64>,
    ista: Vec<f64>,
    fista: Vec<f64>,
}

#[wasm_bindgen]
impl Sweep {
    #[wasm_bindgen(getter)]
    pub fn levels(&self) -> Vec<f64> {
        self.levels.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn input(&self) -> Vec<f64> {
        self.input.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn ista(&self) -> Vec<f64> {
        self.ista.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn fista(&self) -> Vec<f64> {
        self.fista.clone()
    }
}

fn js_err(e: sparse_consist::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn recover(seed: u64, spec: DistortionSpec, lambda: f64, max_iter: usize) -> Result<Recovery, sparse_consist::Error> {
    let dict = gen_dictionary(seed, N, M)?;
    let signal = gen_sparse_signal(seed, &dict, K)?;
    let observed = spec.apply(&signal.x);
    let set = spec.feasibility_set(&observed)?;
    let cfg = SolverConfig {
        lambda,
        max_iter,
        rel_tol: 0.0,
        ..Default::default()
    };
    let ista = solve_ista(&dict, &set, &cfg)?;
    let fista = solve_fista(&dict, &set, &cfg)?;
    let ista_x = dict.synthesize(&ista.alpha)?;
    let fista_x = dict.synthesize(&fista.alpha)?;
    Ok(Recovery {
        input_snr: snr_db(&signal.x, &observed)?,
        ista_snr: snr_db(&signal.x, &ista_x)?,
        fista_snr: snr_db(&signal.x, &fista_x)?,
        clean: signal.x,
        observed,
        ista: ista_x,
        fista: fista_x,
        ista_objective: ista.trace.objective_per_iter,
        fista_objective: fista.trace.objective_per_iter,
    })
}

/// Clip a random sparse signal at `±theta` and recover it.
#[wasm_bindgen]
pub fn declip(seed: u32, theta: f64, lambda: f64, max_iter: u32) -> Result<Recovery, JsError> {
    let spec = DistortionSpec::clip_symmetric(theta).map_err(js_err)?;
    recover(seed.into(), spec, lambda, max_iter as usize).map_err(js_err)
}

/// Quantize a random sparse signal with `bits` bits and recover it.
#[wasm_bindgen]
pub fn dequantize(seed: u32, bits: u32, lambda: f64, max_iter: u32) -> Result<Recovery, JsError> {
    let spec = DistortionSpec::quantize(bits).map_err(js_err)?;
    recover(seed.into(), spec, lambda, max_iter as usize).map_err(js_err)
}

fn sweep_grid(task: &str) -> Result<Vec<DistortionSpec>, sparse_consist::Error> {
    match task {
        "declipping" => sparse_consist::experiments::clip_grid(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
        "dequantization" => sparse_consist::experiments::bit_grid(&[2, 3, 4, 5, 6, 7, 8]),
        other => Err(sparse_consist::Error::InvalidArgument(format!(
            "unknown task {other:?} (expected declipping or dequantization)"
        ))),
    }
}

/// Mean SNR of the observation and both solvers across a grid.
#[wasm_bindgen]
pub fn sweep(task: &str, seed: u32, trials: u32, lambda: f64) -> Result<Sweep, JsError> {
    let grid = sweep_grid(task).map_err(js_err)?;
    let spec = ExperimentSpec {
        n: N,
        m: M,
        k_sparse: K,
        trials: trials as usize,
        seed: seed.into(),
        distortion_grid: grid.clone(),
        solvers: vec![SolverKind::Ista, SolverKind::Fista],
        solver_config: SolverConfig::with_lambda(lambda),
        ..Default::default()
    };
    let r = run_experiment(&spec).map_err(js_err)?;
    let series = |s| grid.iter().map(|g| r.point(g, s).map_or(f64::NAN, |p| p.mean_snr_db)).collect();
    Ok(Sweep {
        levels: grid.iter().map(|g| g.parameter()).collect(),
        input: grid.iter().map(|g| r.input_snr(g).unwrap_or(f64::NAN)).collect(),
        ista: series(SolverKind::Ista),
        fista: series(SolverKind::Fista),
    })
}
