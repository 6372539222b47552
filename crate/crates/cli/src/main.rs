mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use symq::numeric::parse_rational;
use symq::verify::{parse_suites, Suite};
use symq::{Rational, WeightProfile};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "symq", version, about = "Query complexity of partial symmetric Boolean functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Block sensitivity, fractional block sensitivity, degree and approximate degree.
    Measures(MeasuresArgs),
    /// Bias curve of one algorithm family over a range of query counts.
    Bias(BiasArgs),
    /// Monte Carlo runs checked against the analytic success probabilities.
    Simulate(SimulateArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
    /// Quantum and classical bias of f_n^{k,l} over an (n, k, l, T) grid.
    Sweep(SweepArgs),
}

/// Parsed function spec together with the text it came from.
#[derive(Clone, Debug)]
pub struct FunctionSpec {
    pub text: String,
    pub profile: WeightProfile,
}

fn parse_spec(s: &str) -> Result<FunctionSpec, String> {
    let profile: WeightProfile = s.parse().map_err(|e: symq::SymqError| e.to_string())?;
    Ok(FunctionSpec { text: s.to_string(), profile })
}

/// Inclusive integer range `a..b`, a single value, or a comma list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<usize>);

fn parse_int_list(s: &str) -> Result<IntList, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let values = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(IntList(values))
}

fn parse_t_list(s: &str) -> Result<IntList, String> {
    let list = parse_int_list(s)?;
    if list.0.contains(&0) {
        return Err("T must be at least 1".into());
    }
    Ok(list)
}

fn parse_prob(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).ok_or_else(|| format!("`{s}` is not a number"))?;
    if r <= Rational::from_integer(0.into()) || r >= Rational::new(1.into(), 2.into()) {
        return Err(format!("`{s}` must lie strictly between 0 and 1/2"));
    }
    Ok(r)
}

fn parse_seed(s: &str) -> Result<u64, String> {
    s.parse::<u64>().map_err(|e| format!("seed `{s}`: {e}"))
}

#[derive(Clone, Debug)]
pub struct SuiteList(pub Vec<Suite>);

fn parse_suite_list(s: &str) -> Result<SuiteList, String> {
    parse_suites(s).map(SuiteList).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Decimal 64-bit seed.
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct MeasuresArgs {
    #[arg(value_parser = parse_spec)]
    pub spec: FunctionSpec,
    /// Error levels for the approximate degree, comma separated.
    #[arg(long, value_parser = parse_prob, value_delimiter = ',', default_value = "1/3")]
    pub eps: Vec<Rational>,
    /// Bias level for the reported query bound over sensitive pairs.
    #[arg(long, value_parser = parse_prob)]
    pub beta: Option<Rational>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Lp,
    Bound,
}

#[derive(Args, Debug)]
pub struct BiasArgs {
    #[arg(value_parser = parse_spec)]
    pub spec: FunctionSpec,
    #[arg(long, value_enum, default_value = "classical")]
    pub side: Side,
    #[arg(long, value_enum, default_value = "simulate")]
    pub mode: Mode,
    /// Query counts: `a..b` (inclusive), `a`, or `a,b,c`.
    #[arg(long = "T", value_parser = parse_t_list, default_value = "1..4")]
    pub t: IntList,
    #[arg(long, value_parser = parse_prob, default_value = "1/3")]
    pub eps: Rational,
    #[arg(long, value_parser = parse_prob, default_value = "1/4")]
    pub delta: Rational,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(value_parser = parse_spec)]
    pub spec: FunctionSpec,
    #[arg(long, value_enum, default_value = "classical")]
    pub side: Side,
    #[arg(long = "T", value_parser = parse_t_list, default_value = "2")]
    pub t: IntList,
    /// Input weights to test; defaults to every defined weight.
    #[arg(long, value_parser = parse_int_list)]
    pub weight: Option<IntList>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, value_parser = parse_prob, default_value = "1/3")]
    pub eps: Rational,
    #[arg(long, value_parser = parse_prob, default_value = "1/4")]
    pub delta: Rational,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `all` or a comma list of distances, kravchuk, measures, classical, quantum.
    #[arg(value_parser = parse_suite_list, default_value = "all")]
    pub suites: SuiteList,
    #[arg(long, default_value_t = 1e-9, allow_negative_numbers = true)]
    pub tolerance: f64,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_int_list)]
    pub n: IntList,
    #[arg(long, value_parser = parse_int_list)]
    pub k: IntList,
    #[arg(long, value_parser = parse_int_list)]
    pub l: IntList,
    #[arg(long = "T", value_parser = parse_t_list)]
    pub t: IntList,
    /// Run the grid on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            if !e.to_string().contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    if let Command::Bias(a) = &cli.command {
        if a.side == Side::Quantum && a.mode == Mode::Lp {
            Cli::command().error(ErrorKind::ArgumentConflict, "--mode lp is only available with --side classical").exit();
        }
    }
    let result = match cli.command {
        Command::Measures(a) => commands::measures(&a),
        Command::Bias(a) => commands::bias(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Sweep(a) => commands::sweep(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
