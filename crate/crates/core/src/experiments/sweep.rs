use std::fmt::{self, Write as _};
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{gen_dictionary, gen_sparse_signal};
use super::snr_db;
use crate::error::{Error, Result};
use crate::operators::{Dictionary, DistortionSpec};
use crate::solvers::{solve_admm_constrained, solve_fista, solve_ista, AdmmConfig, SolveResult, SolverConfig};

pub const DEFAULT_CLIP_LEVELS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
pub const DEFAULT_BIT_DEPTHS: [u32; 5] = [2, 3, 4, 5, 6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Admm,
    Ista,
    Fista,
}

impl SolverKind {
    /// Column order of the timing table.
    pub const ALL: [SolverKind; 3] = [SolverKind::Admm, SolverKind::Ista, SolverKind::Fista];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Admm => "admm",
            SolverKind::Ista => "ista",
            SolverKind::Fista => "fista",
        }
    }

    pub fn run(
        self,
        dict: &Dictionary,
        set: &crate::IntervalSet,
        config: &SolverConfig,
        admm: &AdmmConfig,
    ) -> Result<SolveResult> {
        match self {
            SolverKind::Ista => solve_ista(dict, set, config),
            SolverKind::Fista => solve_fista(dict, set, config),
            SolverKind::Admm => solve_admm_constrained(dict, set, admm),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ista" => Ok(SolverKind::Ista),
            "fista" => Ok(SolverKind::Fista),
            "admm" => Ok(SolverKind::Admm),
            other => Err(Error::InvalidArgument(format!("unknown solver {other:?}"))),
        }
    }
}

/// Full description of a synthetic sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub n: usize,
    pub m: usize,
    pub k_sparse: usize,
    pub trials: usize,
    pub seed: u64,
    /// Points to evaluate. Clip and quantizer points may be mixed; each is
    /// reported under its own task.
    pub distortion_grid: Vec<DistortionSpec>,
    pub solvers: Vec<SolverKind>,
    pub solver_config: SolverConfig,
    pub admm_config: AdmmConfig,
    /// Draw one dictionary for all trials instead of one per trial.
    pub shared_dictionary: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            n: 256,
            m: 512,
            k_sparse: 16,
            trials: 100,
            seed: 0,
            distortion_grid: clip_grid(&DEFAULT_CLIP_LEVELS).expect("valid default levels"),
            solvers: SolverKind::ALL.to_vec(),
            solver_config: SolverConfig::default(),
            admm_config: AdmmConfig::default(),
            shared_dictionary: false,
        }
    }
}

pub fn clip_grid(levels: &[f64]) -> Result<Vec<DistortionSpec>> {
    levels.iter().map(|&t| DistortionSpec::clip_symmetric(t)).collect()
}

pub fn bit_grid(bits: &[u32]) -> Result<Vec<DistortionSpec>> {
    bits.iter().map(|&b| DistortionSpec::quantize(b)).collect()
}

impl ExperimentSpec {
    pub fn declipping(levels: &[f64]) -> Result<Self> {
        Ok(Self {
            distortion_grid: clip_grid(levels)?,
            ..Self::default()
        })
    }

    pub fn dequantization(bits: &[u32]) -> Result<Self> {
        Ok(Self {
            distortion_grid: bit_grid(bits)?,
            ..Self::default()
        })
    }

    /// Both default grids, as used for the timing table.
    pub fn timing_default() -> Self {
        let mut grid = clip_grid(&DEFAULT_CLIP_LEVELS).expect("valid default levels");
        grid.extend(bit_grid(&DEFAULT_BIT_DEPTHS).expect("valid default bit depths"));
        Self {
            distortion_grid: grid,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("signal and code dimensions must be positive".into()));
        }
        if self.k_sparse == 0 || self.k_sparse > self.m {
            return Err(Error::InvalidArgument(format!(
                "k_sparse must be in 1..={} (got {})",
                self.m, self.k_sparse
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.distortion_grid.is_empty() {
            return Err(Error::InvalidArgument("distortion grid is empty".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidArgument("no solvers selected".into()));
        }
        for d in &self.distortion_grid {
            d.validate()?;
        }
        self.solver_config.validate(self.m)?;
        if self.solvers.contains(&SolverKind::Admm) {
            self.admm_config.validate()?;
        }
        Ok(())
    }

    fn dictionary_seed(&self, trial: usize) -> u64 {
        if self.shared_dictionary {
            self.seed
        } else {
            self.seed.wrapping_add(trial as u64)
        }
    }
}

/// Averages for one (distortion, solver) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub distortion: DistortionSpec,
    pub solver: SolverKind,
    pub mean_snr_db: f64,
    /// Sample standard deviation across trials (0 for a single trial).
    pub std_snr_db: f64,
    pub mean_iterations: f64,
    pub mean_wall_time_s: f64,
    pub successes: usize,
    /// Runs that errored or produced a non-finite SNR; excluded from means.
    pub failures: usize,
}

/// SNR of the raw observation against the clean signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPoint {
    pub distortion: DistortionSpec,
    pub input_snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    /// Ordered by grid point, then by the spec's solver order.
    pub per_point: Vec<PointResult>,
    pub input_snr_db: Vec<InputPoint>,
}

#[derive(Debug, Clone, Copy)]
struct RunOutcome {
    snr_db: f64,
    iterations: usize,
    seconds: f64,
}

struct TrialOutcome {
    input_snr_db: Vec<f64>,
    /// Indexed `[point * n_solvers + solver]`.
    runs: Vec<Option<RunOutcome>>,
}

fn run_trial(spec: &ExperimentSpec, trial: usize, shared: Option<&Dictionary>) -> Result<TrialOutcome> {
    let owned;
    let dict = match shared {
        Some(d) => d,
        None => {
            owned = gen_dictionary(spec.dictionary_seed(trial), spec.n, spec.m)?;
            &owned
        }
    };
    let signal_seed = spec.seed.wrapping_add(trial as u64);
    let signal = gen_sparse_signal(signal_seed, dict, spec.k_sparse)?;
    // Step size is shared by all solvers and kept out of their timings.
    let lipschitz_ok = dict.lipschitz().is_ok();

    let mut input_snr_db = Vec::with_capacity(spec.distortion_grid.len());
    let mut runs = Vec::with_capacity(spec.distortion_grid.len() * spec.solvers.len());
    for distortion in &spec.distortion_grid {
        let y = distortion.apply(&signal.x);
        input_snr_db.push(snr_db(&signal.x, &y)?);
        let set = distortion.feasibility_set(&y)?;
        for &solver in &spec.solvers {
            if !lipschitz_ok && solver != SolverKind::Admm {
                runs.push(None);
                continue;
            }
            let outcome = solver
                .run(dict, &set, &spec.solver_config, &spec.admm_config)
                .ok()
                .and_then(|r| {
                    let x_hat = dict.synthesize(&r.alpha).ok()?;
                    let snr = snr_db(&signal.x, &x_hat).ok().filter(|s| s.is_finite())?;
                    Some(RunOutcome {
                        snr_db: snr,
                        iterations: r.trace.iterations_run,
                        seconds: r.trace.wall_time_seconds,
                    })
                });
            runs.push(outcome);
        }
    }
    Ok(TrialOutcome { input_snr_db, runs })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return if xs.is_empty() { f64::NAN } else { 0.0 };
    }
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs the sweep described by `spec`.
///
/// Trials run on the current rayon pool when the `parallel` feature is on;
/// results are reduced in trial order so the output does not depend on the
/// number of threads. Solver failures are counted per point and excluded
/// from the averages.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<AggregateResult> {
    spec.validate()?;
    let shared = if spec.shared_dictionary {
        let d = gen_dictionary(spec.seed, spec.n, spec.m)?;
        let _ = d.lipschitz();
        Some(d)
    } else {
        None
    };

    let run = |t: usize| run_trial(spec, t, shared.as_ref());
    #[cfg(feature = "parallel")]
    let trials: Vec<TrialOutcome> = (0..spec.trials).into_par_iter().map(run).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let trials: Vec<TrialOutcome> = (0..spec.trials).map(run).collect::<Result<_>>()?;

    let n_solvers = spec.solvers.len();
    let mut per_point = Vec::with_capacity(spec.distortion_grid.len() * n_solvers);
    let mut input_snr_db = Vec::with_capacity(spec.distortion_grid.len());
    for (p, distortion) in spec.distortion_grid.iter().enumerate() {
        let inputs: Vec<f64> = trials.iter().map(|t| t.input_snr_db[p]).collect();
        input_snr_db.push(InputPoint {
            distortion: *distortion,
            input_snr_db: mean(&inputs),
        });
        for (s, &solver) in spec.solvers.iter().enumerate() {
            let ok: Vec<RunOutcome> = trials.iter().filter_map(|t| t.runs[p * n_solvers + s]).collect();
            let snrs: Vec<f64> = ok.iter().map(|r| r.snr_db).collect();
            let iters: Vec<f64> = ok.iter().map(|r| r.iterations as f64).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.seconds).collect();
            per_point.push(PointResult {
                distortion: *distortion,
                solver,
                mean_snr_db: mean(&snrs),
                std_snr_db: sample_std(&snrs),
                mean_iterations: mean(&iters),
                mean_wall_time_s: mean(&times),
                successes: ok.len(),
                failures: trials.len() - ok.len(),
            });
        }
    }
    Ok(AggregateResult {
        per_point,
        input_snr_db,
    })
}

pub const RESULTS_CSV_HEADER: &str = "task,solver,distortion_param,mean_snr_db,std_snr_db,mean_iters,mean_time_s";

impl AggregateResult {
    pub fn point(&self, distortion: &DistortionSpec, solver: SolverKind) -> Option<&PointResult> {
        self.per_point
            .iter()
            .find(|p| p.distortion == *distortion && p.solver == solver)
    }

    pub fn input_snr(&self, distortion: &DistortionSpec) -> Option<f64> {
        self.input_snr_db
            .iter()
            .find(|p| p.distortion == *distortion)
            .map(|p| p.input_snr_db)
    }

    pub fn total_failures(&self) -> usize {
        self.per_point.iter().map(|p| p.failures).sum()
    }

    /// Results table, one row per (point, solver).
    ///
    /// Wall time is the only non-reproducible quantity; with
    /// `include_timing = false` the `mean_time_s` column holds `NA` so that
    /// identical specs give byte-identical files.
    pub fn to_csv(&self, include_timing: bool) -> String {
        let mut out = String::from(RESULTS_CSV_HEADER);
        out.push('\n');
        for p in &self.per_point {
            let time = if include_timing {
                p.mean_wall_time_s.to_string()
            } else {
                "NA".to_string()
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.distortion.task_name(),
                p.solver,
                p.distortion.parameter(),
                p.mean_snr_db,
                p.std_snr_db,
                p.mean_iterations,
                time
            );
        }
        out
    }

    /// Two-column plot data (`parameter mean_snr_db`), one block per task and
    /// series (`input` first, then each solver). Blocks are separated by two
    /// blank lines.
    pub fn plot_data(&self) -> String {
        let mut tasks: Vec<&'static str> = Vec::new();
        for p in &self.input_snr_db {
            if !tasks.contains(&p.distortion.task_name()) {
                tasks.push(p.distortion.task_name());
            }
        }
        let mut solvers: Vec<SolverKind> = Vec::new();
        for p in &self.per_point {
            if !solvers.contains(&p.solver) {
                solvers.push(p.solver);
            }
        }

        let mut out = String::new();
        let mut first = true;
        let mut block = |out: &mut String, header: String, rows: Vec<(f64, f64)>| {
            if !first {
                out.push_str("\n\n");
            }
            first = false;
            let _ = writeln!(out, "{header}");
            for (x, y) in rows {
                let _ = writeln!(out, "{x} {y}");
            }
        };
        for task in tasks {
            let axis = if task == "declipping" { "clip level" } else { "bits" };
            let rows = self
                .input_snr_db
                .iter()
                .filter(|p| p.distortion.task_name() == task)
                .map(|p| (p.distortion.parameter(), p.input_snr_db))
                .collect();
            block(&mut out, format!("# task={task} series=input x={axis} y=snr_db"), rows);
            for &solver in &solvers {
                let rows = self
                    .per_point
                    .iter()
                    .filter(|p| p.distortion.task_name() == task && p.solver == solver)
                    .map(|p| (p.distortion.parameter(), p.mean_snr_db))
                    .collect();
                block(&mut out, format!("# task={task} series={solver} x={axis} y=snr_db"), rows);
            }
        }
        out
    }
}

/// Mean solver wall time per (task, solver).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub task: String,
    pub solver: SolverKind,
    pub mean_wall_time_s: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingTable {
    pub rows: Vec<TimingRow>,
}

impl TimingTable {
    /// Averages over every successful run of each solver within each task.
    pub fn from_aggregate(result: &AggregateResult) -> Self {
        let mut rows: Vec<TimingRow> = Vec::new();
        for p in &result.per_point {
            let task = p.distortion.task_name();
            let total = p.mean_wall_time_s * p.successes as f64;
            match rows.iter_mut().find(|r| r.task == task && r.solver == p.solver) {
                Some(r) => {
                    let sum = r.mean_wall_time_s * r.runs as f64 + if p.successes > 0 { total } else { 0.0 };
                    r.runs += p.successes;
                    r.mean_wall_time_s = if r.runs > 0 { sum / r.runs as f64 } else { f64::NAN };
                }
                None => rows.push(TimingRow {
                    task: task.to_string(),
                    solver: p.solver,
                    mean_wall_time_s: if p.successes > 0 { p.mean_wall_time_s } else { f64::NAN },
                    runs: p.successes,
                }),
            }
        }
        Self { rows }
    }

    pub fn get(&self, task: &str, solver: SolverKind) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.task == task && r.solver == solver)
            .map(|r| r.mean_wall_time_s)
    }

    /// Rows are tasks, columns are solvers in the order ADMM, ISTA, FISTA
    /// (only those present).
    pub fn to_csv(&self) -> String {
        let solvers: Vec<SolverKind> = SolverKind::ALL
            .into_iter()
            .filter(|s| self.rows.iter().any(|r| r.solver == *s))
            .collect();
        let mut tasks: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !tasks.contains(&r.task.as_str()) {
                tasks.push(&r.task);
            }
        }
        let mut out = String::from("task");
        for s in &solvers {
            out.push(',');
            out.push_str(s.name());
        }
        out.push('\n');
        for task in tasks {
            out.push_str(task);
            for &s in &solvers {
                out.push(',');
                if let Some(t) = self.get(task, s) {
                    out.push_str(&t.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the sweep and reduces it to mean wall time per task and solver.
pub fn run_timing_table(spec: &ExperimentSpec) -> Result<(TimingTable, AggregateResult)> {
    let result = run_experiment(spec)?;
    Ok((TimingTable::from_aggregate(&result), result))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        let mut grid = clip_grid(&[0.5, 1.0]).unwrap();
        grid.extend(bit_grid(&[3]).unwrap());
        ExperimentSpec {
            n: 24,
            m: 48,
            k_sparse: 3,
            trials: 3,
            seed: 11,
            distortion_grid: grid,
            solvers: vec![SolverKind::Ista, SolverKind::Fista, SolverKind::Admm],
            solver_config: SolverConfig::default(),
            admm_config: AdmmConfig { max_iter: 30, ..AdmmConfig::default() },
            shared_dictionary: false,
        }
    }

    fn strip_timing(mut r: AggregateResult) -> AggregateResult {
        for p in &mut r.per_point {
            p.mean_wall_time_s = 0.0;
        }
        r
    }

    #[test]
    fn covers_grid_times_solvers_and_is_deterministic() {
        let spec = small_spec();
        let a = run_experiment(&spec).unwrap();
        assert_eq!(a.per_point.len(), 3 * 3);
        assert_eq!(a.input_snr_db.len(), 3);
        assert_eq!(a.total_failures(), 0);
        assert!(a.per_point.iter().all(|p| p.mean_snr_db.is_finite()));
        let b = run_experiment(&spec).unwrap();
        assert_eq!(strip_timing(a.clone()), strip_timing(b));
        assert_eq!(a.to_csv(false), run_experiment(&spec).unwrap().to_csv(false));
    }

    #[test]
    fn no_clipping_point_has_infinite_headroom() {
        let spec = small_spec();
        let r = run_experiment(&spec).unwrap();
        let unclipped = DistortionSpec::clip_symmetric(1.0).unwrap();
        assert_eq!(r.input_snr(&unclipped), Some(300.0));
    }

    #[test]
    fn shared_dictionary_changes_draws() {
        let mut spec = small_spec();
        spec.solvers = vec![SolverKind::Fista];
        let per_trial = run_experiment(&spec).unwrap();
        spec.shared_dictionary = true;
        let shared = run_experiment(&spec).unwrap();
        assert_ne!(strip_timing(per_trial), strip_timing(shared));
    }

    #[test]
    fn csv_layout() {
        let mut spec = small_spec();
        spec.trials = 1;
        spec.solvers = vec![SolverKind::Fista];
        let r = run_experiment(&spec).unwrap();
        let csv = r.to_csv(false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], RESULTS_CSV_HEADER);
        assert_eq!(lines.len(), 1 + 3);
        assert!(lines[1].starts_with("declipping,fista,0.5,"));
        let cols: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!((cols[4], cols[6]), ("0", "NA"));
        assert!(lines[3].starts_with("dequantization,fista,3,"));
        assert!(!r.to_csv(true).contains("NA"));

        let plot = r.plot_data();
        assert!(plot.contains("# task=declipping series=input"));
        assert!(plot.contains("# task=dequantization series=fista"));
    }

    #[test]
    fn timing_table_layout() {
        let spec = small_spec();
        let (table, _) = run_timing_table(&spec).unwrap();
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "task,admm,ista,fista");
        assert!(lines[1].starts_with("declipping,"));
        assert!(lines[2].starts_with("dequantization,"));
        assert_eq!(lines.len(), 3);
        assert_eq!(table.rows.iter().find(|r| r.task == "declipping" && r.solver == SolverKind::Ista).unwrap().runs, 6);
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec::default().validate().is_ok());
        assert!(ExperimentSpec { trials: 0, ..small_spec() }.validate().is_err());
        assert!(ExperimentSpec { k_sparse: 49, ..small_spec() }.validate().is_err());
        assert!(ExperimentSpec { distortion_grid: vec![], ..small_spec() }.validate().is_err());
        assert!(ExperimentSpec { solvers: vec![], ..small_spec() }.validate().is_err());
        let d = ExperimentSpec::default();
        assert_eq!((d.n, d.m, d.k_sparse, d.trials, d.seed), (256, 512, 16, 100, 0));
        assert_eq!(d.solver_config.lambda, 1e-2);
        assert_eq!(ExperimentSpec::timing_default().distortion_grid.len(), 9);
    }

    #[test]
    fn solver_names_parse() {
        for s in SolverKind::ALL {
            assert_eq!(s.name().parse::<SolverKind>().unwrap(), s);
        }
        assert!("lasso".parse::<SolverKind>().is_err());
    }
}
