use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "teig", version, about = "Special transmission eigenvalues: forward solver, checks and inversion")]
pub struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "TEIG_WORKERS")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate zeros of the dispersion function in a region.
    Forward(ForwardArgs),
    /// Fit a profile to spectral data.
    Invert(InvertArgs),
    /// Run the invariant suite on a profile.
    Verify(VerifyArgs),
    /// Sample phi(b) and phi'(b) on the b-lattices from D.
    SampleGrid(SampleGridArgs),
    /// Compare real zeros with the lattice n^2 pi^2/(a-b)^2.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Constant,
    PiecewiseConstant,
    PiecewiseCubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    ALessB,
    AEqualsB,
    AGreaterB,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SearchTolerances {
    /// Terminal box diameter of the subdivision.
    #[arg(long, default_value_t = 0.05)]
    pub resolution: f64,
    /// Absolute tolerance of each contour edge integral.
    #[arg(long, default_value_t = 1e-4)]
    pub tol_quad_abs: f64,
    /// Relative tolerance of each contour edge integral.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_quad_rel: f64,
    /// Largest accepted error of a non-converged edge integral.
    #[arg(long, default_value_t = 0.05)]
    pub tol_edge: f64,
    /// Allowed distance of a winding number from an integer.
    #[arg(long, default_value_t = 0.1)]
    pub tol_winding: f64,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// re_lo,re_hi,im_lo,im_hi
    #[arg(long, default_value = "-1,400,-5,5", allow_hyphen_values = true)]
    pub region: String,
    #[command(flatten)]
    pub search: SearchTolerances,
    /// Eigenvalue table (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write |D| and arg D on a grid over the region (CSV).
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Plot grid as n_re,n_im.
    #[arg(long, default_value = "200,40")]
    pub grid: String,
    /// Also write the zeros as spectral data JSON, with gamma and the lattice tail.
    #[arg(long)]
    pub data_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Complete inversion problem (JSON).
    #[arg(long, conflicts_with = "spectral_data")]
    pub problem: Option<PathBuf>,
    /// Spectral data (JSON); the problem is assembled from the flags below.
    #[arg(long)]
    pub spectral_data: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, value_enum, default_value_t = RegimeArg::ALessB)]
    pub regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = Family::Constant)]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub pieces: usize,
    /// Comma-separated starting parameters.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Zero groups matched (default: up to 8).
    #[arg(long)]
    pub zeros: Option<usize>,
    /// Extracted Dirichlet and Dirichlet-Neumann eigenvalues matched per spectrum.
    #[arg(long, default_value_t = 0)]
    pub two_spectra: usize,
    /// Target for the weighted residual norm.
    #[arg(long)]
    pub tol_fit: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Lattice cells searched for the sum rule.
    #[arg(long, default_value_t = 4)]
    pub truncation: usize,
    #[command(flatten)]
    pub search: SearchTolerances,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_conjugation: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_mean_value: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_branch: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_liouville: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_maclaurin: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_sum_rule: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_sampling: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleGridArgs {
    #[arg(long, conflicts_with = "spectral_data", required_unless_present = "spectral_data")]
    pub profile: Option<PathBuf>,
    /// Reconstruct D from spectral data instead of shooting.
    #[arg(long)]
    pub spectral_data: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Product truncation for spectral data (default: every complete group or cell).
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Grid points per lattice.
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AsymptoticsArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// Number of lattice points compared.
    #[arg(long, default_value_t = 20)]
    pub count: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
