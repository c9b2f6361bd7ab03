use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gralasso::covariance::CorrelationEstimator;
use gralasso::regression::{FitOptions, SelectionRule, WeightMode};
use gralasso::simulation::Method;

/// Robust adaptive-Lasso variable selection under cellwise contamination.
#[derive(Debug, Parser)]
#[command(name = "gralasso", version)]
pub struct Cli {
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0, env = "GRALASSO_THREADS")]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit on a CSV dataset and write a report, coefficients and the CV curve.
    Fit(FitCmd),
    /// Rank predictors by marginal correlation with the response.
    Screen(ScreenCmd),
    /// Generate one contaminated training set, a clean test set and truth.
    Simulate(SimulateCmd),
    /// Run a contamination grid and write per-replicate and aggregate CSVs.
    Benchmark(BenchmarkCmd),
    /// Selection rates with redundant predictors, clean versus contaminated.
    Protocol(ProtocolCmd),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV with a header row.
    #[arg(long, env = "GRALASSO_INPUT")]
    pub input: PathBuf,

    /// Name of the response column.
    #[arg(long, default_value = "y", env = "GRALASSO_RESPONSE")]
    pub response: String,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Initial-estimate weights: auto, direct, ridge or unit.
    #[arg(long, default_value = "auto", env = "GRALASSO_WEIGHTS")]
    pub weights: WeightMode,

    /// Ridge shift for ridge weights.
    #[arg(long, default_value_t = 0.1, env = "GRALASSO_KAPPA")]
    pub kappa: f64,

    /// Choose the ridge shift by cross-validation.
    #[arg(long, env = "GRALASSO_SELECT_KAPPA")]
    pub select_kappa: bool,

    #[arg(long, default_value_t = 5, env = "GRALASSO_FOLDS")]
    pub folds: usize,

    #[arg(long, default_value_t = 100, env = "GRALASSO_N_LAMBDA")]
    pub n_lambda: usize,

    /// Smallest over largest λ (default 1e-3 when p < n, else 1e-2).
    #[arg(long, env = "GRALASSO_LAMBDA_RATIO")]
    pub lambda_ratio: Option<f64>,

    /// min or 1se.
    #[arg(long, default_value = "1se", env = "GRALASSO_RULE")]
    pub rule: SelectionRule,

    #[arg(long, default_value_t = 0, env = "GRALASSO_SEED")]
    pub seed: u64,
}

impl SolverArgs {
    pub fn options(&self, estimator: CorrelationEstimator) -> FitOptions {
        FitOptions {
            estimator,
            weights: self.weights,
            kappa: self.kappa,
            select_kappa: self.select_kappa,
            n_lambda: self.n_lambda,
            lambda_ratio: self.lambda_ratio,
            folds: self.folds,
            seed: self.seed,
            rule: self.rule,
            ..FitOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FitCmd {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, default_value = "fit-out", env = "GRALASSO_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    /// gr, spearman or pearson.
    #[arg(long, default_value = "gr", env = "GRALASSO_ESTIMATOR")]
    pub estimator: CorrelationEstimator,

    /// Fit at this λ instead of cross-validating.
    #[arg(long, env = "GRALASSO_LAMBDA")]
    pub lambda: Option<f64>,

    /// Also write the correlation and covariance matrices.
    #[arg(long)]
    pub write_matrices: bool,

    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ScreenCmd {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, default_value = "screen-out", env = "GRALASSO_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    #[arg(long, default_value_t = 100, env = "GRALASSO_SCREEN_K")]
    pub screen_k: usize,

    #[arg(long, default_value = "gr", env = "GRALASSO_ESTIMATOR")]
    pub estimator: CorrelationEstimator,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, default_value_t = 100, env = "GRALASSO_N")]
    pub n: usize,

    #[arg(long, default_value_t = 20, env = "GRALASSO_P")]
    pub p: usize,

    /// AR(1) correlation between neighbouring predictors.
    #[arg(long, default_value_t = 0.5, env = "GRALASSO_RHO")]
    pub rho: f64,

    #[arg(long, default_value_t = 1.0, env = "GRALASSO_NOISE_SD")]
    pub noise_sd: f64,
}

#[derive(Debug, Args)]
pub struct SimulateCmd {
    #[command(flatten)]
    pub design: DesignArgs,

    /// Cellwise contamination rate.
    #[arg(long, default_value_t = 0.05, env = "GRALASSO_E")]
    pub e: f64,

    /// Outlier magnitude.
    #[arg(long, default_value_t = 6.0, env = "GRALASSO_GAMMA")]
    pub gamma: f64,

    #[arg(long, default_value_t = 0, env = "GRALASSO_SEED")]
    pub seed: u64,

    #[arg(long, default_value = "sim-out", env = "GRALASSO_OUTPUT_DIR")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkCmd {
    #[command(flatten)]
    pub design: DesignArgs,

    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.02,0.05,0.1",
        env = "GRALASSO_E_LIST"
    )]
    pub e_list: Vec<f64>,

    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,4,6,8,10",
        env = "GRALASSO_GAMMA_LIST"
    )]
    pub gamma_list: Vec<f64>,

    #[arg(long, default_value_t = 200, env = "GRALASSO_REPLICATES")]
    pub replicates: usize,

    #[arg(
        long,
        value_delimiter = ',',
        default_value = "gr-alasso,alasso,lasso",
        env = "GRALASSO_METHODS"
    )]
    pub methods: Vec<Method>,

    /// Record CSVs of external methods to merge into the aggregate.
    #[arg(long)]
    pub external: Vec<PathBuf>,

    /// Contaminate the test sets as well.
    #[arg(long)]
    pub contaminate_test: bool,

    /// Write zero run times so reruns are byte-identical.
    #[arg(long)]
    pub no_timing: bool,

    #[arg(long, default_value = "bench-out", env = "GRALASSO_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ProtocolCmd {
    /// CSV dataset; a synthetic stand-in is used when omitted.
    #[arg(long, env = "GRALASSO_INPUT")]
    pub input: Option<PathBuf>,

    #[arg(long, default_value = "y", env = "GRALASSO_RESPONSE")]
    pub response: String,

    #[arg(long, default_value_t = 200, env = "GRALASSO_REPLICATES")]
    pub replicates: usize,

    /// Number of redundant AR(1) predictors appended.
    #[arg(long, default_value_t = 10)]
    pub redundant: usize,

    #[arg(long, default_value_t = 0.05, env = "GRALASSO_E")]
    pub e: f64,

    #[arg(long, default_value_t = 10.0, env = "GRALASSO_GAMMA")]
    pub gamma: f64,

    #[arg(long, default_value = "gr", env = "GRALASSO_ESTIMATOR")]
    pub estimator: CorrelationEstimator,

    #[arg(long, default_value = "protocol-out", env = "GRALASSO_OUTPUT_DIR")]
    pub output_dir: PathBuf,

    #[command(flatten)]
    pub solver: SolverArgs,
}
