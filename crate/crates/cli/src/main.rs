use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod svg;

use config::Config;

/// Ridgelet spectra, Tikhonov global minimizers and shallow-network
/// ensembles on synthetic 1-D regression problems.
#[derive(Parser, Debug)]
#[command(name = "ridgelab", version)]
struct Cli {
    /// Worker threads (RIDGELAB_JOBS overrides).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// key = value defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset CSV.
    Gen(GenArgs),
    /// Train an ensemble of shallow networks.
    Train(TrainArgs),
    /// Monte Carlo ridgelet spectrum of a 1-D dataset.
    Spectrum(SpectrumArgs),
    /// Tikhonov global minimizer over a grid of hidden parameters.
    Optimize(OptimizeArgs),
    /// Compare trained units (and optionally γ*) against a spectrum.
    Compare(CompareArgs),
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// sin, noise, sin10, topsin, gausskernel, square
    #[arg(long)]
    pub dataset: Option<String>,
    /// Sample size [default: 1000, topsin 10000]
    #[arg(long)]
    pub s: Option<usize>,
    /// Std of additive Gaussian noise [default: 0]
    #[arg(long)]
    pub noise: Option<f64>,
    /// Center of the Gaussian kernel [default: 0]
    #[arg(long)]
    pub mu: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: <dataset>.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Dataset name, used only to pick the default p.
    #[arg(long)]
    pub dataset: Option<String>,
    /// tanh, relu, gaussian, ptanh:A, prelu:A [default: tanh]
    #[arg(long)]
    pub act: Option<String>,
    /// Hidden units [default: 10, or 100 for sin10/topsin/square]
    #[arg(long)]
    pub p: Option<usize>,
    /// Ensemble size [default: 100]
    #[arg(long)]
    pub n: Option<usize>,
    /// adam or lbfgs [default: adam]
    #[arg(long)]
    pub opt: Option<String>,
    /// ADAM learning rate [default: 0.001]
    #[arg(long)]
    pub lr: Option<f64>,
    /// [default: 1000]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Mini-batch size for ADAM [default: full batch]
    #[arg(long)]
    pub batch: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// (a, b) ~ U(-scale, scale) [default: 1]
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// c ~ N(0, c_std²) [default: 0.1]
    #[arg(long)]
    pub c_std: Option<f64>,
    /// [default: 10]
    #[arg(long)]
    pub lbfgs_memory: Option<usize>,
    /// Lower |c| quantile kept by the filter [default: 0.02]
    #[arg(long)]
    pub filter_low: Option<f64>,
    /// Upper |c| quantile kept by the filter [default: 0.98]
    #[arg(long)]
    pub filter_high: Option<f64>,
    /// Also write per-epoch loss traces.
    #[arg(long)]
    pub traces: bool,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// tanh or relu [default: tanh]
    #[arg(long)]
    pub act: Option<String>,
    /// [default: -25]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_lo: Option<f64>,
    /// [default: 25]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_hi: Option<f64>,
    /// Cells per axis [default: 128]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Keep the raw Monte Carlo sums instead of scaling to max |value| = 1.
    #[arg(long)]
    pub raw: bool,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// [default: tanh]
    #[arg(long)]
    pub act: Option<String>,
    /// [default: -30]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_lo: Option<f64>,
    /// [default: 30]
    #[arg(long, allow_negative_numbers = true)]
    pub grid_hi: Option<f64>,
    /// Cells per axis [default: 64]
    #[arg(long)]
    pub steps: Option<usize>,
    /// [default: 0.001]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Evaluation points on [-1, 1] for 1-D data [default: 401]
    #[arg(long)]
    pub eval_points: Option<usize>,
    /// Cross-check against R_ρ*[y] (dense solve).
    #[arg(long)]
    pub rho_star: bool,
    /// Write the Gram matrix as gram.csv and gram.bin.
    #[arg(long)]
    pub dump_gram: bool,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Spectrum CSV (a,b,value).
    #[arg(long)]
    pub spectrum: PathBuf,
    /// Unit CSV (run,unit,a0,b,c,final_loss).
    #[arg(long)]
    pub units: PathBuf,
    /// γ* spectrum CSV on the same grid, for the correlation.
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// A check failed after the computation itself succeeded.
    Numeric(String),
    Core(ridgelab::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 4,
            CliError::Numeric(_) => 3,
            CliError::Core(e) if e.is_numeric() => 3,
            CliError::Core(e) if e.is_io() || matches!(e, ridgelab::Error::Parse(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ridgelab::Error> for CliError {
    fn from(e: ridgelab::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn configure_threads(cli_jobs: Option<usize>, cfg: &Config) -> Result<(), CliError> {
    let env = match std::env::var("RIDGELAB_JOBS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            CliError::Usage(format!(
                "RIDGELAB_JOBS must be a positive integer, got '{v}'"
            ))
        })?),
        Err(_) => None,
    };
    let jobs = match env {
        Some(j) => Some(j),
        None => cfg.resolve_opt(cli_jobs, "jobs")?,
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    configure_threads(cli.jobs, &cfg)?;
    match cli.command {
        Command::Gen(args) => commands::gen(args, &cfg),
        Command::Train(args) => commands::train(args, &cfg),
        Command::Spectrum(args) => commands::spectrum(args, &cfg),
        Command::Optimize(args) => commands::optimize(args, &cfg),
        Command::Compare(args) => commands::compare(args, &cfg),
        Command::Selftest => commands::selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
