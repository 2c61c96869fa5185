//! `rmc` — exact solvers for min-q-multiset multicover and its robust
//! counterpart under budgeted demand uncertainty.

mod commands;
mod formats;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use rmc_core::robust::Formulation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_TIME_LIMIT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "rmc",
    about = "Robust multiset multicover: solvers, generators and benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file to robust optimality by constraint generation
    Solve(SolveArgs),
    /// Generate an instance file (random parameters or a street graph)
    Generate(GenerateArgs),
    /// Run the random-instance benchmark grid and write a CSV report
    Bench(BenchArgs),
    /// Check a supplier vector for robust feasibility
    Check(CheckArgs),
    /// Run one separation round against a supplier vector
    Separate(SeparateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormulationArg {
    Setf,
    Asf,
}

impl From<FormulationArg> for Formulation {
    fn from(value: FormulationArg) -> Self {
        match value {
            FormulationArg::Setf => Formulation::Setf,
            FormulationArg::Asf => Formulation::Asf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SeparationMethod {
    Set,
    Bigm,
    Brute,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance file
    pub instance: PathBuf,
    /// Constraint-generation driver
    #[arg(long, value_enum, default_value = "setf")]
    pub formulation: FormulationArg,
    /// Wall-clock limit in seconds (default: none)
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Add up to four cuts per separation round instead of one
    #[arg(long)]
    pub multi_cut: bool,
    /// Also report worst-case and median-of-N average-case objectives
    #[arg(long)]
    pub avg_scenarios: Option<usize>,
    /// Seed for the average-case scenario draws
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_k_pair(text: &str) -> Result<(u64, u64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected `k1,k2`".into());
    }
    let k1 = parts[0].trim().parse().map_err(|_| "bad k1".to_string())?;
    let k2 = parts[1].trim().parse().map_err(|_| "bad k2".to_string())?;
    Ok((k1, k2))
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Location count for the random generator
    #[arg(long, default_value_t = 10)]
    pub ni: usize,
    /// Region count for the random generator
    #[arg(long, default_value_t = 100)]
    pub nj: usize,
    /// Edge density in (0, 1]
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Demand ranges `k1,k2`: lower in [0,k1], upper adds [1,k2]
    #[arg(long, value_parser = parse_k_pair, default_value = "0,1")]
    pub k: (u64, u64),
    /// Gamma factor in [0, 1] placing the budget between sum(a) and sum(b)
    #[arg(long, default_value_t = 0.5)]
    pub d: f64,
    /// Demand units one supplier can serve
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Build from a weighted street-graph file instead of random data
    #[arg(long)]
    pub geo: Option<PathBuf>,
    /// Travel-time threshold (minutes) for the geographic construction
    #[arg(long, default_value_t = 15.0)]
    pub threshold: f64,
    /// Demand budget for the geographic construction
    #[arg(long)]
    pub gamma: Option<u64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Location counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub ni: Vec<usize>,
    /// Region count
    #[arg(long, default_value_t = 100)]
    pub nj: usize,
    /// Edge densities, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub p: Vec<f64>,
    /// Demand ranges, semicolon-separated `k1,k2` pairs
    #[arg(long, value_parser = parse_k_pair, value_delimiter = ';', default_value = "0,1")]
    pub k: Vec<(u64, u64)>,
    /// Gamma factors, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub d: Vec<f64>,
    /// Replicates per grid cell
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 3)]
    pub q: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scenario draws behind each average-case value
    #[arg(long, default_value_t = 10)]
    pub avg_scenarios: usize,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Wall-clock limit per solve in seconds
    #[arg(long, default_value_t = 120.0)]
    pub time_limit: f64,
    /// Add up to four cuts per separation round instead of one
    #[arg(long)]
    pub multi_cut: bool,
    /// Output CSV path; aggregates land next to it as `<stem>.agg.csv`
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Instance file
    pub instance: PathBuf,
    /// Supplier counts per location, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<u64>,
    /// Wall-clock limit in seconds for the separation solve
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Args)]
pub struct SeparateArgs {
    /// Instance file
    pub instance: PathBuf,
    /// Supplier counts per location, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<u64>,
    /// Separation route
    #[arg(long, value_enum, default_value = "set")]
    pub method: SeparationMethod,
    /// Wall-clock limit in seconds
    #[arg(long)]
    pub time_limit: Option<f64>,
}

fn main() {
    // RMC_LOG in {off, info, debug} controls tracing verbosity
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RMC_LOG", "off")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let code = match &cli.command {
        Command::Solve(args) => commands::cmd_solve(args),
        Command::Generate(args) => commands::cmd_generate(args),
        Command::Bench(args) => commands::cmd_bench(args),
        Command::Check(args) => commands::cmd_check(args),
        Command::Separate(args) => commands::cmd_separate(args),
    };
    std::process::exit(code);
}
