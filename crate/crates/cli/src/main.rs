use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use meerr_cli::{run, Axis, Command, Format, RunConfig, Sweep, EXIT_ERROR};

/// Mean estimators with auxiliary variates under measurement error: theory,
/// Monte Carlo and comparisons.
#[derive(Parser)]
#[command(name = "meerr", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// First-order bias and MSE of each estimator, plus the bounds.
    Theory(Common),
    /// Monte Carlo estimates of bias and MSE.
    Simulate(Common),
    /// Monte Carlo against theory with z-scores; exits 2 if any row fails.
    Compare(Common),
    /// Theory along a grid of sample sizes or error CVs.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario document (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
    /// Report format: csv or json.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// z-score threshold for compare.
    #[arg(long, default_value_t = 4.0)]
    z: f64,
    /// Sweep axis: n, c0_err or c_err:<i>.
    #[arg(long)]
    axis: Option<Axis>,
    /// Comma-separated, strictly increasing sweep values.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Monte Carlo worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Cmd::Theory(a) => (Command::Theory, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let sweep = match (args.axis, args.grid) {
        (Some(axis), Some(grid)) => Some(Sweep { axis, grid }),
        (None, None) => None,
        _ => {
            eprintln!("error: --axis and --grid must be given together");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let cfg = RunConfig {
        config: args.config,
        command,
        out: args.out,
        format: args.format,
        z: args.z,
        sweep,
        threads: args.threads,
    };
    match run(&cfg) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
