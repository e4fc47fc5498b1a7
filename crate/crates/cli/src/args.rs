use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparse_consist::experiments::SolverKind;
use sparse_consist::DistortionSpec;

pub const SEED_ENV: &str = "SPARSE_CONSIST_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "sparse-consist",
    version,
    about = "Sparse recovery from clipped or quantized signals",
    after_help = "Exit codes: 0 ok, 1 solver failure (with --strict), 2 invalid input, 3 dimension mismatch.\n\
                  SPARSE_CONSIST_SEED, when set, overrides --seed."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover one signal from an observation file.
    Solve(SolveArgs),
    /// Declipping sweep over clip levels.
    DeclipBench(DeclipArgs),
    /// Dequantization sweep over bit depths.
    DequantBench(DequantArgs),
    /// Mean solver wall time per task.
    Timing(TimingArgs),
    /// Write a synthetic instance (dictionary, code, clean and observed signal).
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Ista,
    Fista,
    Admm,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Ista => SolverKind::Ista,
            SolverArg::Fista => SolverKind::Fista,
            SolverArg::Admm => SolverKind::Admm,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverOpts {
    /// Sparsity weight λ.
    #[arg(long, default_value_t = 1e-2)]
    pub lambda: f64,
    /// Iteration cap (outer iterations for ADMM).
    #[arg(long, default_value_t = 400)]
    pub max_iter: usize,
    /// Stop when the relative objective change falls below this.
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Dictionary file (.csv, otherwise binary).
    #[arg(long)]
    pub dict: PathBuf,
    /// Observed signal, one value per line.
    #[arg(long)]
    pub signal: PathBuf,
    /// Distortion that produced the observation: clip:θ, clip:θ+:θ−, quant:Nb or none.
    #[arg(long)]
    pub distortion: DistortionSpec,
    #[arg(long, value_enum, default_value_t = SolverArg::Fista)]
    pub solver: SolverArg,
    #[command(flatten)]
    pub solver_opts: SolverOpts,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 1 when the solver does not converge.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchOpts {
    /// Trials per grid point.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Signal length N.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Number of atoms M.
    #[arg(long, default_value_t = 512)]
    pub m: usize,
    /// Non-zeros per code.
    #[arg(long = "sparsity", short = 'k', default_value_t = 16)]
    pub k_sparse: usize,
    /// Comma-separated solvers to run.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SolverArg::Admm, SolverArg::Ista, SolverArg::Fista])]
    pub solvers: Vec<SolverArg>,
    #[command(flatten)]
    pub solver_opts: SolverOpts,
    /// Worker threads (0 = all hardware threads).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Draw one dictionary for all trials.
    #[arg(long)]
    pub shared_dictionary: bool,
    /// Results CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write plot data (x, mean SNR per series) to this path.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Fill the mean_time_s column; makes the CSV run-dependent.
    #[arg(long)]
    pub with_timing: bool,
    /// Exit with status 1 when any solver run failed.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct DeclipArgs {
    /// Comma-separated clip levels θ.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6, 0.8])]
    pub grid: Vec<f64>,
    #[command(flatten)]
    pub bench: BenchOpts,
}

#[derive(Debug, Args)]
pub struct DequantArgs {
    /// Comma-separated bit depths.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4, 5, 6])]
    pub grid: Vec<u32>,
    #[command(flatten)]
    pub bench: BenchOpts,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Comma-separated distortions, e.g. clip:0.6,quant:4.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "clip:0.2,clip:0.4,clip:0.6,clip:0.8,quant:2,quant:3,quant:4,quant:5,quant:6"
    )]
    pub grid: Vec<DistortionSpec>,
    #[command(flatten)]
    pub bench: BenchOpts,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 512)]
    pub m: usize,
    #[arg(long = "sparsity", short = 'k', default_value_t = 16)]
    pub k_sparse: usize,
    /// Distortion applied to produce y.txt.
    #[arg(long, default_value = "clip:0.6")]
    pub distortion: DistortionSpec,
    /// Write the dictionary as CSV instead of binary.
    #[arg(long)]
    pub csv: bool,
}
