use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

const ENV_HELP: &str =
    "Environment:\n  FRACSERIES_SEED  reserved for future stochastic features; currently ignored";

#[derive(Debug, Parser)]
#[command(
    name = "fracseries",
    version,
    about = "Series solutions of time-fractional PDEs via the natural transform and He polynomials",
    after_help = ENV_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the truncated series solution of a problem file.
    Solve(SolveArgs),
    /// Verify the transform table by numerical quadrature.
    TransformCheck(TransformCheckArgs),
    /// Substitute the truncated series back into the equation.
    Residual(ResidualArgs),
    /// Compare a 1-D linear diffusion solution against the L1 reference solver.
    Compare(CompareArgs),
    /// Tabulate Mittag-Leffler values.
    MlEval(MlEvalArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (component / equation / ic / alpha lines).
    #[arg(long)]
    pub problem: PathBuf,
    /// Fractional order in (0, 1]; overrides the file's alpha line.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Truncation order N.
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
}

/// Evaluation grid. The spatial range applies to every variable of the problem.
#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub x_max: f64,
    /// Points per spatial variable.
    #[arg(long, default_value_t = 21)]
    pub x_count: usize,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 11)]
    pub t_count: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// CSV output: component, x[, y, z], t, value, residual.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformCheckArgs {
    /// Largest accepted |numeric − closed form|.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// CSV output: entry, s, u, numeric, closed_form, abs_err.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Exit with status 3 when any residual exceeds this value.
    #[arg(long)]
    pub tol: Option<f64>,
    /// CSV output: component, x[, y, z], t, residual.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Problem file of the form Dt^a v = k*v_xx.
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 12)]
    pub terms: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_end: f64,
    #[arg(long, default_value_t = 201)]
    pub n_x: usize,
    #[arg(long, default_value_t = 2000)]
    pub n_t: usize,
    /// Read the reference grid (t, x, value) from this CSV instead of solving.
    #[arg(long, conflicts_with = "write_grid")]
    pub grid: Option<PathBuf>,
    /// Also write the computed reference grid as CSV.
    #[arg(long)]
    pub write_grid: Option<PathBuf>,
    /// Exit with status 3 when the max abs error exceeds this value.
    #[arg(long)]
    pub tol: Option<f64>,
    /// CSV output: x, t, series, oracle, abs_err.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MlEvalArgs {
    /// One or more orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub z_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub z_max: f64,
    #[arg(long, default_value_t = 101)]
    pub count: usize,
    /// CSV output: alpha, z, value, capped. Written to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
