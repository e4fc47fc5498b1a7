use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use sparse_consist::experiments::{
    bit_grid, clip_grid, gen_dictionary, gen_sparse_signal, run_experiment, run_timing_table, ExperimentSpec,
    SolverKind,
};
use sparse_consist::operators::io;
use sparse_consist::{AdmmConfig, DistortionSpec, Error, SolverConfig};

use crate::args::{BenchOpts, Command, GenArgs, SolveArgs, SolverOpts, TimingArgs, SEED_ENV};

/// Error carrying the process exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DIMENSION: u8 = 3;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => EXIT_DIMENSION,
            Error::ProjectionNotConverged { .. } => EXIT_SOLVER,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Solve(a) => solve(a),
        Command::DeclipBench(a) => {
            let grid = clip_grid(&a.grid)?;
            bench(grid, &a.bench)
        }
        Command::DequantBench(a) => {
            let grid = bit_grid(&a.grid)?;
            bench(grid, &a.bench)
        }
        Command::Timing(a) => timing(a),
        Command::Gen(a) => gen(a),
    }
}

fn solver_config(opts: &SolverOpts) -> Result<SolverConfig, Failure> {
    let cfg = SolverConfig {
        lambda: opts.lambda,
        max_iter: opts.max_iter,
        rel_tol: opts.rel_tol,
        ..Default::default()
    };
    cfg.validate(1)?;
    Ok(cfg)
}

fn solve(a: SolveArgs) -> CmdResult {
    let cfg = solver_config(&a.solver_opts)?;
    let admm = AdmmConfig {
        max_iter: a.solver_opts.max_iter,
        ..Default::default()
    };
    let dict = io::load_dictionary(&a.dict)?;
    let y = io::load_signal(&a.signal)?;
    a.distortion.validate()?;
    if y.len() != dict.n() {
        return Err(Failure {
            code: EXIT_DIMENSION,
            message: format!(
                "dimension mismatch: dictionary has {} rows but the signal has {} samples",
                dict.n(),
                y.len()
            ),
        });
    }
    let set = a.distortion.feasibility_set(&y)?;
    let kind = SolverKind::from(a.solver);
    let result = kind.run(&dict, &set, &cfg, &admm)?;
    let x_hat = dict.synthesize(&result.alpha)?;
    let converged = result.trace.converged;

    let mut json = serde_json::to_value(&result).map_err(|e| input_error(e.to_string()))?;
    let obj = json.as_object_mut().expect("solve report is an object");
    obj.insert("solver".into(), kind.name().into());
    obj.insert("distortion".into(), a.distortion.to_string().into());
    obj.insert("lambda".into(), cfg.lambda.into());
    obj.insert("x_hat".into(), x_hat.into());
    let mut text = serde_json::to_string_pretty(&json).map_err(|e| input_error(e.to_string()))?;
    text.push('\n');
    emit(a.out.as_deref(), &text)?;

    if a.strict && !converged {
        return Err(Failure {
            code: EXIT_SOLVER,
            message: format!("{} did not converge within {} iterations", kind.name(), cfg.max_iter),
        });
    }
    Ok(())
}

/// Seed from the environment when set, otherwise from the flag.
fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input_error(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn configure_jobs(jobs: usize) -> CmdResult {
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| input_error(format!("cannot start {jobs} worker threads: {e}")))?;
    }
    Ok(())
}

fn experiment_spec(grid: Vec<sparse_consist::DistortionSpec>, b: &BenchOpts) -> Result<ExperimentSpec, Failure> {
    let mut solvers: Vec<SolverKind> = Vec::new();
    for s in &b.solvers {
        let k = SolverKind::from(*s);
        if !solvers.contains(&k) {
            solvers.push(k);
        }
    }
    let spec = ExperimentSpec {
        n: b.n,
        m: b.m,
        k_sparse: b.k_sparse,
        trials: b.trials,
        seed: effective_seed(b.seed)?,
        distortion_grid: grid,
        solvers,
        solver_config: solver_config(&b.solver_opts)?,
        admm_config: AdmmConfig {
            max_iter: b.solver_opts.max_iter,
            ..Default::default()
        },
        shared_dictionary: b.shared_dictionary,
    };
    spec.validate()?;
    Ok(spec)
}

fn bench(grid: Vec<DistortionSpec>, b: &BenchOpts) -> CmdResult {
    let spec = experiment_spec(grid, b)?;
    configure_jobs(b.jobs)?;
    let result = run_experiment(&spec)?;
    emit(b.out.as_deref(), &result.to_csv(b.with_timing))?;
    if let Some(path) = &b.plot_data {
        write_atomic(path, result.plot_data())?;
    }
    strict_check(b.strict, result.total_failures())
}

fn timing(a: TimingArgs) -> CmdResult {
    let spec = experiment_spec(a.grid, &a.bench)?;
    configure_jobs(a.bench.jobs)?;
    let (table, result) = run_timing_table(&spec)?;
    emit(a.bench.out.as_deref(), &table.to_csv())?;
    if let Some(path) = &a.bench.plot_data {
        write_atomic(path, result.plot_data())?;
    }
    strict_check(a.bench.strict, result.total_failures())
}

fn strict_check(strict: bool, failures: usize) -> CmdResult {
    if strict && failures > 0 {
        return Err(Failure {
            code: EXIT_SOLVER,
            message: format!("{failures} solver run(s) failed"),
        });
    }
    Ok(())
}

fn gen(a: GenArgs) -> CmdResult {
    a.distortion.validate()?;
    let seed = effective_seed(a.seed)?;
    let dict = gen_dictionary(seed, a.n, a.m)?;
    let signal = gen_sparse_signal(seed, &dict, a.k_sparse)?;
    let y = a.distortion.apply(&signal.x);

    fs::create_dir_all(&a.out).map_err(|e| input_error(format!("{}: {e}", a.out.display())))?;
    let dict_name = if a.csv { "dictionary.csv" } else { "dictionary.bin" };
    let mut bytes = Vec::new();
    if a.csv {
        io::write_dictionary_csv(&dict, &mut bytes)?;
    } else {
        io::write_dictionary_binary(&dict, &mut bytes)?;
    }
    write_atomic(&a.out.join(dict_name), &bytes)?;
    write_atomic(&a.out.join("alpha.txt"), io::format_signal(&signal.alpha))?;
    write_atomic(&a.out.join("x.txt"), io::format_signal(&signal.x))?;
    write_atomic(&a.out.join("y.txt"), io::format_signal(&y))?;
    println!("{}", a.out.join(dict_name).display());
    Ok(())
}

fn emit(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| input_error(format!("stdout: {e}")))
        }
    }
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult {
    let fail = |e: std::io::Error| input_error(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_ref()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
