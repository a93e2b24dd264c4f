use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod check;
mod eval;
mod output;
mod symbols;
mod table;

use output::CliError;

#[derive(Parser, Debug)]
#[command(name = "besselrad", version, about = "Damped two-spherical-Bessel integrals in closed form")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Suppress banners and per-case lines.
    #[arg(long, global = true)]
    quiet: bool,

    /// Relative tolerance for oracle quadrature (eval, table) or for the
    /// pass/fail comparison (check).
    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one bare integral ∫ r^n e^{-αr} j_λ1(k1 r) j_λ2(k2 r) dr.
    Eval(EvalArgs),
    /// Sweep parameters over a grid and write CSV or JSON.
    Table(TableArgs),
    /// Exact Wigner 3j symbol.
    Wigner3j(Wigner3jArgs),
    /// Exact Wigner 6j symbol.
    Wigner6j(Wigner6jArgs),
    /// Run an identity-check suite against the quadrature oracles.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub lambda1: u32,
    #[arg(long)]
    pub lambda2: u32,
    #[arg(long)]
    pub power: u32,
    #[arg(long)]
    pub k1: f64,
    #[arg(long)]
    pub k2: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Also integrate numerically and report the discrepancy.
    #[arg(long)]
    pub oracle: bool,
    /// Also print the coupled product (λ1 λ2 λ3; 0 0 0) × integral.
    #[arg(long)]
    pub product: bool,
    /// Use the oracle where no closed form applies.
    #[arg(long)]
    pub fallback_oracle: bool,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// `param=start:stop:count`, repeatable; the grid is the cartesian product.
    #[arg(long = "sweep", value_name = "PARAM=START:STOP:COUNT")]
    pub sweeps: Vec<String>,
    #[arg(long)]
    pub lambda1: Option<u32>,
    #[arg(long)]
    pub lambda2: Option<u32>,
    #[arg(long)]
    pub power: Option<u32>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub k2: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub fallback_oracle: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Wigner3jArgs {
    /// `j1,j2,j3`
    #[arg(long, allow_hyphen_values = true)]
    pub j: String,
    /// `m1,m2,m3`
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
}

#[derive(Args, Debug)]
pub struct Wigner6jArgs {
    /// `j1,j2,j3,j4,j5,j6`
    #[arg(long)]
    pub j: String,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub suite: check::Suite,
    #[arg(long, default_value_t = 4)]
    pub max_l: u32,
}

pub struct Global {
    pub json: bool,
    pub quiet: bool,
    pub rel_tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global {
        json: cli.json,
        quiet: cli.quiet,
        rel_tol: cli.rel_tol,
    };
    let result = match &cli.command {
        Command::Eval(args) => eval::run(args, &global),
        Command::Table(args) => table::run(args, &global),
        Command::Wigner3j(args) => symbols::run_3j(args, &global),
        Command::Wigner6j(args) => symbols::run_6j(args, &global),
        Command::Check(args) => check::run(args, &global),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

impl From<besselrad::Error> for CliError {
    fn from(e: besselrad::Error) -> Self {
        use besselrad::Error;
        let code = match e {
            Error::InvalidArgument(_) | Error::Domain(_) => output::EXIT_USAGE,
            Error::FormulaInapplicable { .. } => output::EXIT_INAPPLICABLE,
            Error::NonConvergence { .. } => output::EXIT_NONCONVERGENCE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}
