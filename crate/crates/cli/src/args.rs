use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pmlkit::Units;

#[derive(Debug, Parser)]
#[command(name = "pmlkit", version, about = "Pointwise maximal leakage of channels and density models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leakage profile of a discrete model, or the leakage of one outcome.
    Compute(ComputeArgs),
    /// Compare leakage against a brute-force adversary oracle.
    Verify(VerifyArgs),
    /// Closed-form leakage of a real-valued family, optionally checked on a grid.
    Continuous(ContinuousArgs),
    /// Tail probabilities P_Y(l > eps) and the leakage CDF.
    Tail(TailArgs),
    /// Write the truncated discrete model of an integer-valued family.
    Discretize(DiscretizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Subset,
    Partition,
    Functions,
    Strategies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Nats,
    Bits,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Nats => Units::Nats,
            UnitsArg::Bits => Units::Bits,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Units of every reported leakage.
    #[arg(long, value_enum, default_value_t = UnitsArg::Nats)]
    pub units: UnitsArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Recorded in every report; drives any sampling.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON model file, or a CSV channel (needs --prior).
    #[arg(long)]
    pub channel: PathBuf,
    /// Prior file; overrides the prior inside a JSON model.
    #[arg(long)]
    pub prior: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Report only this outcome (by its label).
    #[arg(long)]
    pub outcome: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub oracle: OracleKind,
    /// Cell width of the partition oracle, in nats.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Largest number of groups for the function oracle (default: all inputs).
    #[arg(long)]
    pub max_groups: Option<usize>,
    /// Simplex resolution of the strategy check.
    #[arg(long, default_value_t = 20)]
    pub resolution: usize,
    /// Gain table for the strategy check: {"estimates": [...], "gain": [[...]]}.
    /// Defaults to guessing X itself.
    #[arg(long)]
    pub gain: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ContinuousArgs {
    /// Family description as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_negative_numbers = true)]
    pub outcome: f64,
    /// Grid settings as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub grid: Option<String>,
    /// Also evaluate the density-ratio grid and report the gap.
    #[arg(long)]
    pub check_grid: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Thresholds, in the report's units.
    #[arg(long, num_args = 1.., required = true)]
    pub eps: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    /// geometric_binary or poisson_binomial description, inline JSON or a path.
    #[arg(long)]
    pub family: String,
    /// Mass each truncated law may drop.
    #[arg(long, default_value_t = 1e-12)]
    pub tail: f64,
    /// Largest outcome whose posterior must be fully represented (poisson_binomial).
    #[arg(long, default_value_t = 10)]
    pub y_max: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
