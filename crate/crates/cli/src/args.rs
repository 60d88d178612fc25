use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyd::truncation::SubroundLimit;

#[derive(Debug, Parser)]
#[command(name = "levyd", version, about = "Simulate beta, gamma and related completely random measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw truncated realizations of a process.
    Simulate(SimulateArgs),
    /// Tabulate truncation errors and expected atom counts.
    TruncationTable(TableArgs),
    /// Draw Bernoulli-process counts from one replica of a simulated beta process.
    Observe(ObserveArgs),
    /// Sample the beta-process posterior given observation counts.
    Posterior(PosteriorArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Beta,
    StableBeta,
    Gamma,
    SymmetricGamma,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Beta => "beta",
            Family::StableBeta => "stable-beta",
            Family::Gamma => "gamma",
            Family::SymmetricGamma => "symmetric-gamma",
        }
    }

    pub fn is_gamma(&self) -> bool {
        matches!(self, Family::Gamma | Family::SymmetricGamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFamily {
    Beta,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Jsonl,
    Csv,
}

/// Process parameters on the unit interval. A comma list gives a piecewise-constant
/// function over that many equal cells.
#[derive(Debug, Clone, Args)]
pub struct ProcessArgs {
    /// Concentration c(ω) (beta families).
    #[arg(long, value_delimiter = ',', default_value = "1", allow_negative_numbers = true)]
    pub c: Vec<f64>,
    /// Scale θ(ω) (gamma families).
    #[arg(long, value_delimiter = ',', default_value = "1", allow_negative_numbers = true)]
    pub theta: Vec<f64>,
    /// Discount σ (stable beta).
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Total base mass γ, spread uniformly.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub mass: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Root seed; generated and recorded in the header when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub replicas: u64,
    /// Worker threads (default: all cores). Output does not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

pub fn parse_subround_limit(s: &str) -> Result<SubroundLimit, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(SubroundLimit::Infinite);
    }
    match s.parse::<u32>() {
        Ok(0) => Err("H must be at least 1".into()),
        Ok(h) => Ok(SubroundLimit::Finite(h)),
        Err(_) => Err(format!("expected a positive integer or 'inf', got '{s}'")),
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Number of rounds: beta rounds 0..N−1, gamma levels 1..N.
    #[arg(long, conflicts_with = "last_k")]
    pub rounds: Option<u32>,
    /// Last round index (beta from 0, gamma from 1).
    #[arg(long = "K")]
    pub last_k: Option<u32>,
    /// Sub-rounds per gamma level, or 'inf'.
    #[arg(long = "H", value_parser = parse_subround_limit)]
    pub last_h: Option<SubroundLimit>,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub family: TableFamily,
    #[command(flatten)]
    pub process: ProcessArgs,
    #[arg(long = "K-min")]
    pub k_min: Option<u32>,
    #[arg(long = "K-max", default_value_t = 20)]
    pub k_max: u32,
    /// Sub-round limits for gamma rows.
    #[arg(long = "H", value_delimiter = ',', value_parser = parse_subround_limit, default_value = "inf")]
    pub last_h: Vec<SubroundLimit>,
    /// Observations M in the marginal bound.
    #[arg(long = "M", default_value_t = 1)]
    pub observations: u32,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ObserveArgs {
    /// JSONL output of `simulate --family beta`.
    #[arg(long)]
    pub prior_draw: PathBuf,
    /// Which replica of the draw to observe.
    #[arg(long, default_value_t = 0)]
    pub replica: u64,
    /// Number of Bernoulli-process draws.
    #[arg(long = "M")]
    pub draws: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PosteriorArgs {
    /// JSONL output of `observe`.
    #[arg(long)]
    pub observations: PathBuf,
    /// The prior draw the observations came from; adds each atom's prior jump to the summary.
    #[arg(long)]
    pub prior_draw: Option<PathBuf>,
    /// Replica of the prior draw that was observed.
    #[arg(long, default_value_t = 0)]
    pub replica: u64,
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Last posterior round.
    #[arg(long = "K", default_value_t = 1000)]
    pub last_k: u32,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Checks to run (default: all).
    #[arg(long, value_delimiter = ',')]
    pub check: Vec<String>,
    /// Single N for the IBP check.
    #[arg(long = "N")]
    pub ibp_n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}
