use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "bec-lab", version, about = "Stability of trapped condensates: Gaussian variational analysis and radial GP relaxation")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, env = "BEC_LAB_THREADS", global = true)]
    pub threads: Option<usize>,

    /// `key = value` defaults; explicit flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Variational,
    Grid,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a single coupling (optionally relaxing on the grid too)
    Analyze(AnalyzeArgs),
    /// Critical coupling and, given trap parameters, the maximum atom number
    Critical(CriticalArgs),
    /// Radius and energy over a list of couplings or atom numbers
    Sweep(SweepArgs),
    /// Variational classification over dimensions and couplings
    Phase(PhaseArgs),
}

#[derive(Debug, Args)]
pub struct PhysicalArgs {
    /// s-wave scattering length in meters
    #[arg(long, allow_hyphen_values = true)]
    pub scattering_length: Option<f64>,

    /// Trap frequency in Hz (ω = 2πf)
    #[arg(long)]
    pub trap_frequency: Option<f64>,

    /// Atomic mass in kg
    #[arg(long)]
    pub mass: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Outer radius of the grid, in oscillator lengths
    #[arg(long)]
    pub rmax: Option<f64>,

    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,

    /// Flow time step
    #[arg(long)]
    pub dt: Option<f64>,

    /// Energy convergence tolerance
    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long)]
    pub max_iters: Option<usize>,

    /// Width of the starting Gaussian
    #[arg(long)]
    pub initial_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub dimension: u8,

    #[arg(long, allow_hyphen_values = true)]
    pub coupling: Option<f64>,

    #[arg(long)]
    pub atoms: Option<u64>,

    #[command(flatten)]
    pub physical: PhysicalArgs,

    /// Also relax on the radial grid
    #[arg(long)]
    pub grid: bool,

    #[command(flatten)]
    pub solver: GridArgs,

    /// Write the relaxed profile (r, psi) here
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(long)]
    pub dimension: u8,

    #[arg(long, value_enum, default_value_t = EngineArg::Variational)]
    pub engine: EngineArg,

    #[command(flatten)]
    pub solver: GridArgs,

    /// Collapsing end of the bisection bracket
    #[arg(long, allow_hyphen_values = true)]
    pub g_lo: Option<f64>,

    /// Converging end of the bisection bracket
    #[arg(long, allow_hyphen_values = true)]
    pub g_hi: Option<f64>,

    /// Bisection stops once the bracket is narrower than this
    #[arg(long)]
    pub tol_g: Option<f64>,

    #[command(flatten)]
    pub physical: PhysicalArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dimension: u8,

    /// `lo:hi:steps`, endpoints included
    #[arg(long, allow_hyphen_values = true)]
    pub coupling_range: Option<String>,

    /// Comma-separated couplings, ascending
    #[arg(long, allow_hyphen_values = true)]
    pub coupling_list: Option<String>,

    /// Comma-separated atom numbers, ascending (3D, needs trap parameters)
    #[arg(long)]
    pub atoms_list: Option<String>,

    #[command(flatten)]
    pub physical: PhysicalArgs,

    #[arg(long, value_enum, default_value_t = EngineArg::Variational)]
    pub engine: EngineArg,

    #[command(flatten)]
    pub solver: GridArgs,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    /// Dimensions to include, comma-separated
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub dimension: Vec<u8>,

    #[arg(long, allow_hyphen_values = true)]
    pub coupling_range: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    pub coupling_list: Option<String>,
}
