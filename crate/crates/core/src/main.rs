use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use utility_duality::cli::{self, CliError, Command, Options};
use utility_duality::scenario::Scenario;

/// Expected utility / expected disutility calculator driven by JSON scenarios.
#[derive(Debug, Parser)]
#[command(name = "duality", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// EU, EDU, CE and AE for every lottery/utility pair.
    Eval(Common),
    /// CE and AE of one lottery across a risk-aversion grid.
    Sweep(Common),
    /// Revise a target for a new lottery at constant effective risk aversion.
    UpdateTarget(Common),
    /// Effective risk aversion that reproduces a target.
    SolveGamma(Common),
    /// EU/EDU/CE/AE matrix and its pure saddle.
    Matrix(Common),
    /// Stage-by-stage saddle-point allocation of lotteries to utilities.
    Allocate(Common),
    /// First- and second-order dominance between two curves.
    Dominance(Common),
    /// Second-order approximations and cumulant series.
    Approx(Common),
    /// Compare fractile, CE and AE target rules.
    Delegate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Write the result table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Sweep points or dominance grid points.
    #[arg(long)]
    grid: Option<usize>,
    /// Number of cumulant-series terms.
    #[arg(long)]
    terms: Option<usize>,
    /// Fractile level for the delegate command.
    #[arg(long)]
    fractile: Option<f64>,
}

fn split(cmd: Cmd) -> (Command, Common) {
    match cmd {
        Cmd::Eval(c) => (Command::Eval, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::UpdateTarget(c) => (Command::UpdateTarget, c),
        Cmd::SolveGamma(c) => (Command::SolveGamma, c),
        Cmd::Matrix(c) => (Command::Matrix, c),
        Cmd::Allocate(c) => (Command::Allocate, c),
        Cmd::Dominance(c) => (Command::Dominance, c),
        Cmd::Approx(c) => (Command::Approx, c),
        Cmd::Delegate(c) => (Command::Delegate, c),
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn execute(cmd: Cmd) -> Result<(), CliError> {
    let (command, common) = split(cmd);
    let scenario = Scenario::load(&common.scenario)?;
    let options = Options {
        tolerance: common.tol,
        grid: common.grid,
        terms: common.terms,
        fractile: common.fractile,
    };
    let out = cli::run(command, &scenario, &options)?;
    print!("{}", out.to_text());
    if let Some(p) = &common.csv {
        write(p, &out.to_csv())?;
    }
    if let Some(p) = &common.json {
        write(p, &out.to_json())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
