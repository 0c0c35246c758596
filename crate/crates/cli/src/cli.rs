use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact level-(n−1) Lasserre gap certificates for 0/1 programs.
#[derive(Debug, Parser)]
#[command(name = "lasgap", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance (and its certificate, when the family has one).
    Gen(GenArgs),
    /// Check a certificate against an instance; exit 0 iff a gap is certified.
    Certify(CertifyArgs),
    /// Check membership of a vector in the level-t relaxation.
    Feas(FeasArgs),
    /// Spectrum of a diagonal-plus-rank-one matrix (float output).
    Eig(EigArgs),
    /// Sweep P for the knapsack family and locate the certification threshold.
    ScanKnap(ScanArgs),
    /// Degree test and no-gap precheck for the objective.
    Degree(ReportArgs),
    /// Single-vertex-cutting test for every constraint.
    Svc(ReportArgs),
    /// Search for an unconstrained gap certificate.
    Search(SearchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gapknap,
    GapknapAug,
    EmptyHull,
    SvcExclude,
    OriginIndicator,
    TwoPoint,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    /// Gap factor for the knapsack families (rational, at least 2).
    #[arg(long, default_value = "2")]
    pub k: String,
    /// Right-hand side of the Hamming constraints (default 1/2^(n+1)).
    #[arg(long)]
    pub b: Option<String>,
    /// Vertex to exclude, e.g. "[1,3]"; repeat for several.
    #[arg(long = "vertex")]
    pub vertices: Vec<String>,
    /// First point of the two-point indicator.
    #[arg(long)]
    pub i1: Option<String>,
    /// Second point of the two-point indicator.
    #[arg(long)]
    pub i2: Option<String>,
    /// Output directory (default: $LASGAP_OUT_DIR, else the current directory).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub instance: PathBuf,
    pub certificate: PathBuf,
    #[arg(long)]
    pub json: bool,
    /// Certify even if some constraint excludes no 0/1 point.
    #[arg(long)]
    pub allow_redundant: bool,
}

#[derive(Debug, Args)]
pub struct FeasArgs {
    pub instance: PathBuf,
    /// Certificate (`yN`) or moment (`y`) file.
    pub vector: PathBuf,
    #[arg(long)]
    pub level: usize,
    /// Threshold for the dense route: PSD iff the least eigenvalue is at least -tol.
    #[arg(long, default_value_t = lasgap::moment::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    /// Comma-separated diagonal entries.
    #[arg(long, allow_hyphen_values = true)]
    pub diag: String,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: String,
    /// Comma-separated ±1 signs (default all +1).
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
    /// Compare against a dense eigensolver.
    #[arg(long)]
    pub dense_check: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: String,
    /// Worker threads for the grid certifications.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = lasgap::certify::DEFAULT_SEARCH_BUDGET)]
    pub budget: usize,
    /// Where to write the certificate if one is found.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}
