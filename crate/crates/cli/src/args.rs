use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fpp",
    version,
    about = "Fractional Poisson processes and fields: simulation, distributions, validation"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo work (0 uses every core); results do not
    /// depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file. Simulations default to a file in $FPP_OUT_DIR (or the
    /// current directory); evaluations default to standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the three-parameter Mittag-Leffler function E^gamma_{alpha,beta}(z).
    MlEval(MlEvalArgs),
    /// Simulate a stable or mixed-stable subordinator on a grid (columns t,L).
    SimulateSubordinator(SubordinatorArgs),
    /// Simulate the inverse subordinator (columns s,Y).
    SimulateInverse(SubordinatorArgs),
    /// Simulate event times of the fractional Poisson process.
    SimulateFpp(SimulateFppArgs),
    /// Simulate event times of the mixed-fractional Poisson process.
    SimulateMfpp(SimulateMfppArgs),
    /// Simulate the fractional Poisson field and its two driving inverse paths.
    SimulateFprf(SimulateFprfArgs),
    /// Probability mass function of a count.
    Pmf(PmfArgs),
    /// Mean, variance and covariance of a count.
    Moments(MomentsArgs),
    /// Trace of a simulated field along the diagonal path (columns t,count).
    Trace(TraceArgs),
    /// Counting process from the records of i.i.d. uniforms (columns t,count).
    Records(RecordsArgs),
    /// Run validation suites and report JSON; exits with 2 when a check fails.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct MlEvalArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Arguments; repeat or separate with commas.
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Vec<f64>,
}

/// Either `--alpha` for a stable law or `--alpha1 --alpha2 --c1 --c2` for a
/// mixed-stable law.
#[derive(Debug, Args)]
pub struct LawArgs {
    #[arg(long, conflicts_with_all = ["alpha1", "alpha2", "c1", "c2"])]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SubordinatorArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Grid step.
    #[arg(long, default_value_t = fracpoisson::subordinate::DEFAULT_DELTA)]
    pub delta: f64,
    /// Simulate until the subordinator exceeds this level.
    #[arg(long)]
    pub t_end: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FppMethod {
    Renewal,
    Timechange,
}

#[derive(Debug, Args)]
pub struct SimulateFppArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = FppMethod::Renewal)]
    pub method: FppMethod,
    /// Grid step of the inverse subordinator (time-change method).
    #[arg(long, default_value_t = fracpoisson::subordinate::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MixedArgs {
    #[arg(long)]
    pub alpha1: f64,
    #[arg(long)]
    pub alpha2: f64,
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
}

#[derive(Debug, Args)]
pub struct SimulateMfppArgs {
    #[command(flatten)]
    pub mixed: MixedArgs,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, default_value_t = fracpoisson::subordinate::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CellLawArg {
    Poisson,
    Bernoulli,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub alpha1: f64,
    #[arg(long)]
    pub alpha2: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Side of the square window [0, window]^2.
    #[arg(long)]
    pub window: f64,
    /// Grid step of both inverse subordinators.
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = CellLawArg::Poisson)]
    pub cell_law: CellLawArg,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateFprfArgs {
    #[command(flatten)]
    pub field: FieldArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Process {
    Fpp,
    Mfpp,
    Fprf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfMethod {
    /// Mittag-Leffler formula (fpp) or Talbot inversion (mfpp).
    Exact,
    /// Convolution recurrence (mfpp).
    Convolution,
    /// Monte Carlo over exact inverse-subordinator draws (mfpp, fprf).
    Montecarlo,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[arg(long, value_enum)]
    pub process: Process,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub lambda: f64,
    /// Time (fpp, mfpp).
    #[arg(long)]
    pub t: Option<f64>,
    /// Field coordinates (fprf).
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub k_max: usize,
    /// Defaults to exact for fpp and mfpp and to Monte Carlo for fprf.
    #[arg(long, value_enum)]
    pub method: Option<PmfMethod>,
    #[arg(long, default_value_t = 10_000)]
    pub n_mc: usize,
    /// Required for Monte Carlo pmfs.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub process: Process,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub lambda: f64,
    /// Time of the mean and variance (fpp, mfpp).
    #[arg(long)]
    pub t: Option<f64>,
    /// Second time of the covariance (fpp, mfpp); defaults to `t`.
    #[arg(long)]
    pub s: Option<f64>,
    /// Point of the mean and variance (fprf).
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    /// Second point of the covariance (fprf); defaults to `(t1, t2)`.
    #[arg(long)]
    pub s1: Option<f64>,
    #[arg(long)]
    pub s2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    /// Number of equally spaced evaluation times on [0, window].
    #[arg(long, default_value_t = 201)]
    pub n_eval: usize,
}

#[derive(Debug, Args)]
pub struct RecordsArgs {
    /// Intensity m(t) = lambda t, or the field compensator along the diagonal
    /// when --alpha1 and --alpha2 are given.
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long, requires = "alpha2")]
    pub alpha1: Option<f64>,
    #[arg(long, requires = "alpha1")]
    pub alpha2: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, default_value_t = 201)]
    pub n_eval: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub seed: u64,
}
