//! `curtail`: generate scenarios, solve them, verify guarantees and run
//! parameter sweeps.
//!
//! Exit status: 0 success, 1 infeasible, 2 input error, 3 a verified bound
//! failed, 4 internal solver failure. Failures also print one JSON object
//! `{"kind", "message"}` on standard error.

mod commands;
mod error;
mod io;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curtail::ScenarioMode;

#[derive(Parser)]
#[command(
    name = "curtail",
    version,
    about = "Curtailment scheduling for net-load balancing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance from a scenario description.
    Generate(GenerateArgs),
    /// Solve an instance and print the schedule with its report.
    Solve(SolveArgs),
    /// Check a schedule against the guarantees of the algorithm that made it.
    Verify(VerifyArgs),
    /// Run an algorithm over a grid of target ranges and parameters.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Dp,
    Fair,
    Online,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Load,
    Solar,
    Mixed,
}

impl From<ModeArg> for ScenarioMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Load => ScenarioMode::Load,
            ModeArg::Solar => ScenarioMode::Solar,
            ModeArg::Mixed => ScenarioMode::Mixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Mcnlb,
    Fair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    Dp,
    Fair,
    Online,
}

/// `L:U` in kWh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetRange(pub f64, pub f64);

impl std::str::FromStr for TargetRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (l, u) = s
            .split_once(':')
            .ok_or_else(|| format!("expected L:U, got {s:?}"))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {v:?}: {e}"))
        };
        Ok(TargetRange(parse(l)?, parse(u)?))
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Scenario JSON; flags below override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub intervals: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub target_range: Option<TargetRange>,
    /// Attach capacity-proportional budgets with this lower fraction.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Hourly radiance CSV with header `hour,wm2`.
    #[arg(long)]
    pub radiance: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance JSON, or `-` for standard input.
    #[arg(long, required_unless_present = "stream")]
    pub instance: Option<PathBuf>,
    #[arg(long, visible_alias = "alg", value_enum)]
    pub algo: Algo,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Replace the instance budgets with capacity-proportional ones.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Exact solver objective; defaults to fair when the instance has budgets.
    #[arg(long, value_enum)]
    pub problem: Option<ProblemArg>,
    /// Online: drop zero strategies that fall below a node's lower bound.
    #[arg(long)]
    pub strict_online_filter: bool,
    /// Online: historical context JSON instead of deriving it from the instance.
    #[arg(long)]
    pub context: Option<PathBuf>,
    /// Online: read one step JSON per line on standard input.
    #[arg(long, requires = "context")]
    pub stream: bool,
    /// Write per-interval results as CSV.
    #[arg(long)]
    pub report_csv: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Output of `solve`, or a bare schedule JSON.
    #[arg(long)]
    pub solution: PathBuf,
    /// Guarantee family; required for a bare schedule.
    #[arg(long, value_enum)]
    pub kind: Option<BoundArg>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Reference optimum for the cost check.
    #[arg(long)]
    pub optimum: Option<f64>,
    #[arg(long)]
    pub context: Option<PathBuf>,
    /// Relative slack allowed on every bound.
    #[arg(long, default_value_t = curtail::evaluation::BOUND_TOLERANCE)]
    pub tolerance: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, visible_alias = "algo", value_enum)]
    pub alg: Algo,
    #[arg(long, value_delimiter = ',', default_values_t = [
        TargetRange(500.0, 1000.0),
        TargetRange(500.0, 1500.0),
        TargetRange(1000.0, 1500.0),
    ])]
    pub target_range: Vec<TargetRange>,
    /// Approximation parameters for dp and online.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.2, 0.1, 0.05, 0.02])]
    pub epsilon: Vec<f64>,
    /// Budget lower fractions for fair and online.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Consecutive seeds per grid cell, starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 20)]
    pub nodes: usize,
    #[arg(long, default_value_t = 16)]
    pub intervals: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Load)]
    pub mode: ModeArg,
    #[arg(long)]
    pub strict_online_filter: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Add a wall-clock column, which makes output non-reproducible.
    #[arg(long)]
    pub timing: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl std::fmt::Display for TargetRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.0, self.1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => commands::generate(&args),
        Command::Solve(args) => commands::solve(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Sweep(args) => sweep::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
