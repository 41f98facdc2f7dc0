use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "sts", version, about = "Random k-sparse partial Steiner triple systems")]
pub struct Cli {
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "STS_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate Erdős configurations up to `jmax` points and save the catalog.
    Catalog(CatalogArgs),
    /// One tracked run of the removal process.
    Run(RunArgs),
    /// Many untracked runs with seeds derived from a master seed.
    Trials(TrialsArgs),
    /// Check a triple-system file for linearity and k-sparseness.
    Verify(VerifyArgs),
    /// Tabulate the trajectories on a grid of steps.
    Trajectory(TrajectoryArgs),
    /// Build a weakly k-sparse partial (n,q,r)-Steiner system.
    Design(DesignArgs),
    /// Conjectured number of k-sparse Steiner triple systems.
    Count(CountArgs),
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    #[arg(long, default_value_t = 8)]
    pub jmax: usize,
    /// Catalog file (default `<out-dir>/catalog-j<jmax>.txt`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Constants of the error function and the stopping point.
#[derive(Args, Debug, Clone)]
pub struct ConstantArgs {
    /// Target is `(1 - gamma) n^2 / 6` chosen triples.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Growth rate `C` of the error function.
    #[arg(long)]
    pub c_err: Option<f64>,
    #[arg(long)]
    pub eps0: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub constants: ConstantArgs,
    /// Number of tracked uncovered pairs.
    #[arg(long, default_value_t = 200)]
    pub edge_sample: usize,
    /// Number of tracked available triples.
    #[arg(long, default_value_t = 50)]
    pub triple_sample: usize,
    /// Snapshot steps, comma separated (default `0, tau/4, tau/2, 3tau/4`).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// Skip tracking and the snapshot CSV.
    #[arg(long)]
    pub no_track: bool,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub wall_clock_secs: Option<u64>,
    /// Output path prefix (default `<out-dir>/run-n<n>-k<k>-s<seed>`); writes
    /// `.sts`, `.csv` and `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrialsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub master_seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub gamma: f64,
    /// Random vertex sets sampled per output when checking sparseness.
    #[arg(long, default_value_t = 2000)]
    pub verify_samples: usize,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Aggregate JSON (default `<out-dir>/trials-n<n>-k<k>-m<seed>.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Use sampling with this many samples when the exhaustive scan is too large.
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Number of grid points on `[0, tau_cut]`.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[command(flatten)]
    pub constants: ConstantArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.3)]
    pub gamma: f64,
    /// Sampling exponent (default: the largest feasible value).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix (default `<out-dir>/design-n<n>-q<q>-r<r>-k<k>-s<seed>`);
    /// writes `.qsys` and `.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}
