//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mmmm",
    version,
    about = "Transient probabilities of the M|M|m|m loss system"
)]
pub struct Cli {
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distribution of N(t) given N(0) = n0.
    Transient(TransientArgs),
    /// Regenerate one of the experiment tables A-E.
    Experiment(ExperimentArgs),
    /// Compare methods against the ODE reference over a grid of (n, t).
    Compare(CompareArgs),
    /// Stationary distribution and Erlang B blocking probability.
    Stationary(StationaryArgs),
}

/// Model parameters shared by the single-system subcommands.
#[derive(Debug, Clone, Copy, Args)]
pub struct ModelArgs {
    /// Arrival rate.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda0: f64,
    /// Service rate per server (1/alpha).
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Number of servers.
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Series,
    Oracle,
    Asymptotic,
    Infinite,
}

impl MethodArg {
    pub fn name(&self) -> &'static str {
        match self {
            MethodArg::Exact => "exact",
            MethodArg::Series => "series",
            MethodArg::Oracle => "oracle",
            MethodArg::Asymptotic => "asymptotic",
            MethodArg::Infinite => "infinite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
pub enum TableId {
    A,
    B,
    C,
    D,
    E,
}

#[derive(Debug, Args)]
pub struct TransientArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Time horizon.
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Initial number of busy servers.
    #[arg(long, default_value_t = 0)]
    pub n0: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Oracle)]
    pub method: MethodArg,
    /// Target bound on the series remainder.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Fixed series truncation order instead of choosing one from --tol.
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<i64>,
    /// Force an asymptotic case (R1A..R2E, BLOCK0, BLOCK1).
    #[arg(long = "case")]
    pub regime: Option<String>,
    /// Replace negative series entries by zero.
    #[arg(long)]
    pub clamp: bool,
    /// Step budget of the ODE integrator.
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Decimal places of the printed probabilities.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub table: TableId,
    /// Case number within tables D and E (all cases when omitted).
    #[arg(long)]
    pub case: Option<usize>,
    /// Arrival rate replacing the case's value (tables D and E).
    #[arg(long)]
    pub lambda0: Option<f64>,
    /// Decimal places of the probability columns.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub n0: usize,
    /// Comma-separated times.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    pub times: Vec<f64>,
    /// Comma-separated occupancies.
    #[arg(long = "n", value_delimiter = ',')]
    pub states: Vec<usize>,
    /// Comma-separated methods to evaluate next to the oracle.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Asymptotic, MethodArg::Infinite])]
    pub methods: Vec<MethodArg>,
    /// Target bound on the series remainder.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,
    /// Significant digits after the point (scientific notation).
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}
