use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "metric-lab", version, about = "Finite metric geometry experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a generator and write the space as JSON.
    Gen(GenArgs),
    /// Check the metric axioms (and optionally coarse statistics) of a space file.
    Validate(ValidateArgs),
    /// Gromov-Hausdorff bounds between two space files.
    Gh(GhArgs),
    /// Blow-up scan of a generator against model tangents.
    Scan(ScanArgs),
    /// Distortion envelope of a sampled map.
    Qs(QsArgs),
    /// Free-group boundary cylinders, expansion probes and ultrametric checks.
    Boundary(BoundaryArgs),
    /// Run every experiment of a manifest and write a checksum index.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator kind: square, plane, slit-carpet, pillow-carpet, snowflake, wu, rug, model.
    #[arg(long, conflicts_with = "space")]
    pub kind: Option<String>,
    /// Full space spec such as `slit-carpet:r=harmonic:levels=2`.
    #[arg(long)]
    pub space: Option<String>,
    /// Slit schedule: comma list, `harmonic` or `const:<r>`.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Further `key=value` generator parameters.
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Mesh, e.g. `1/64`.
    #[arg(long, default_value = "1/32")]
    pub h: String,
    /// Cut a window around this centre instead of writing the whole sample.
    #[arg(long, requires = "radius")]
    pub center: Option<String>,
    #[arg(long)]
    pub radius: Option<String>,
    /// Fail unless the sample satisfies the metric axioms.
    #[arg(long)]
    pub validate: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub space: PathBuf,
    /// Descending probe scales for doubling and perfectness statistics.
    #[arg(long)]
    pub scales: Option<String>,
}

#[derive(Debug, Args)]
pub struct GhArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Base point index in X; pointed comparison when given with `--base-y`.
    #[arg(long, requires = "base_y")]
    pub base_x: Option<usize>,
    #[arg(long, requires = "base_x")]
    pub base_y: Option<usize>,
    /// Run branch-and-bound with this node budget.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = metric_lab::gh::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Space spec, see `gen --space`.
    #[arg(long)]
    pub space: String,
    /// `x,y`, `x,y@left|right`, or `v<stage>:<index>`.
    #[arg(long)]
    pub center: String,
    /// Comma list or `2^-a..2^-b`.
    #[arg(long)]
    pub scales: String,
    #[arg(long, default_value = "1")]
    pub radius: String,
    #[arg(long, default_value = "plane,half,quarter,t")]
    pub models: String,
    /// Window mesh is `lambda / divisor`.
    #[arg(long, default_value = "64")]
    pub divisor: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fill the seconds column with wall-clock times (not byte-stable).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QsArgs {
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub codomain: PathBuf,
    /// Index map as a JSON array or `{"assignment": [...]}`; identity if absent.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// `all` or a number of sampled triples.
    #[arg(long, default_value = "1000000")]
    pub budget: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check the envelope against `η(t) = t^p`.
    #[arg(long)]
    pub eta_power: Option<String>,
    /// Descending radii for the quasiconformality probe.
    #[arg(long)]
    pub radii: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long)]
    pub depth: usize,
    /// Visual metric base `a > 1`.
    #[arg(long, default_value = "2")]
    pub base: String,
    /// `word:m`: the cylinder of level `m` around the first depth-`depth`
    /// point extending `word`.
    #[arg(long)]
    pub cylinder: Option<String>,
    /// Use a seeded sample of this many cylinder points.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub probe_expansion: bool,
    /// Exhaustive ultrametric and four-point checks on the selected points.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Defaults to `index.json` next to the manifest.
    #[arg(long)]
    pub index: Option<PathBuf>,
}
