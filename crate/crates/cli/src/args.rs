use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "torus-soliton",
    version,
    about = "Relative D-stability and Mabuchi solitons on toric Fano varieties"
)]
pub struct Cli {
    /// Run every sweep on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariants, family evaluation and the stability verdict.
    Analyze(AnalyzeArgs),
    /// Exact non-Archimedean energies of one test configuration.
    EvalTc(TcArgs),
    /// Twist-minimized J of one test configuration, with its LP certificate.
    JtMin(JtArgs),
    /// Enumerate crease configurations looking for D_eta < 0.
    Destabilize(DestabilizeArgs),
    /// Run the soliton flow on a truncated box.
    Flow(FlowArgs),
    /// Damped Newton for the soliton equation (1-D only).
    Solve(FlowArgs),
    /// Archimedean slopes along a product ray against the exact values.
    SlopeCheck(SlopeArgs),
    /// List the built-in polytopes and check them against the golden file.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Standard,
    Products,
    NormalCones,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JtModeArg {
    Plain,
    Eta,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Catalog name or a polytope JSON file.
    #[arg(required_unless_present = "from_report")]
    pub target: Option<String>,
    /// `auto`, `zero`, or `mu_1,...,mu_n[,c]`.
    #[arg(long, default_value = "auto")]
    pub eta: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Standard)]
    pub family: FamilyArg,
    /// Write the report as JSON (`-` for stdout).
    #[arg(long)]
    pub emit_json: Option<String>,
    /// Recompute a stored report and compare it byte for byte.
    #[arg(long, conflicts_with_all = ["target", "eta", "family"])]
    pub from_report: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ConfigSource {
    /// PL configuration JSON, a path or inline `{...}`.
    #[arg(long)]
    pub config: Option<String>,
    /// Product configuration `mu_1,...,mu_n[,c]` (`c` defaults to 0), or `eta`.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Normal cone `FACETS@FRACTION` with facets as `i+j`, or `exceptional` for the full-width
    /// cone of the BL1P2 exceptional divisor.
    #[arg(long)]
    pub cone: Option<String>,
}

#[derive(Debug, Args)]
pub struct TcArgs {
    pub target: String,
    #[command(flatten)]
    pub source: ConfigSource,
    #[arg(long, default_value = "auto")]
    pub eta: String,
}

#[derive(Debug, Args)]
pub struct JtArgs {
    #[command(flatten)]
    pub tc: TcArgs,
    #[arg(long, value_enum, default_value_t = JtModeArg::Plain)]
    pub mode: JtModeArg,
}

#[derive(Debug, Args)]
pub struct DestabilizeArgs {
    pub target: String,
    #[arg(long, default_value = "auto")]
    pub eta: String,
    /// Pieces per candidate, the zero piece included.
    #[arg(long, default_value_t = 3)]
    pub max_pieces: usize,
    #[arg(long, default_value_t = 2)]
    pub max_denominator: i64,
    #[arg(long, default_value_t = 5000)]
    pub max_candidates: usize,
    /// Shuffle the enumeration order.
    #[arg(long)]
    pub randomize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    pub target: String,
    /// Nodes per axis (default 257 in 1-D, 129 in 2-D).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the box in log coordinates.
    #[arg(long = "box", default_value_t = 8.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    /// Residual tolerance (default 5e-3 for `flow`, 1e-10 for `solve`).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Step cap (Newton iterations for `solve`).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value = "auto")]
    pub eta: String,
    /// Trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Final potential as a JSON grid dump.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Start from a JSON grid dump instead of the lattice reference.
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// Also reject steps that increase R.
    #[arg(long)]
    pub monotone_r: bool,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    pub target: String,
    /// Ray direction `mu_1,...,mu_n[,c]` or `eta`.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long = "T", default_value_t = 40.0)]
    pub t_max: f64,
    /// Nodes per axis (default 257 in 1-D, 193 in 2-D).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long = "box", default_value_t = 8.0)]
    pub radius: f64,
    #[arg(long, default_value = "auto")]
    pub eta: String,
    /// Skip the J_T row.
    #[arg(long)]
    pub no_translations: bool,
    #[arg(long)]
    pub emit_json: Option<String>,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    /// Show a single entry.
    pub name: Option<String>,
    /// Regenerate the golden file from the current code.
    #[arg(long)]
    pub bless: bool,
    #[arg(long)]
    pub golden: Option<PathBuf>,
    #[arg(long)]
    pub emit_json: Option<String>,
}
