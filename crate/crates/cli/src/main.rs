//! `driftcorrect`: curve data, simulations and point estimates for
//! base-rate correction under prior probability shift.
//!
//! Exit codes: 0 success, 1 an oracle check failed, 2 usage error,
//! 3 invalid input or I/O failure.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    BoundaryArgs, EstimateArgs, Failure, MseDiffArgs, Report, SimulateArgs, SlopeCurveArgs,
    VerifyArgs,
};
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "driftcorrect",
    version,
    about = "Base-rate correction under prior probability shift"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Absolute slope of the calibration bias against p (p00 = p11 = p).
    SlopeCurve(SlopeCurveArgs),
    /// MSE difference between the two estimators along the drift.
    MseDiffCurve(MseDiffArgs),
    /// Positive drift at which the two estimators' MSEs are equal, against p.
    BoundaryCurve(BoundaryArgs),
    /// Monte Carlo moments of both estimators next to the analytic ones.
    Simulate(SimulateArgs),
    /// Cross-check analytic moments against simulation over the oracle grid.
    Verify(VerifyArgs),
    /// Correct a naive base-rate estimate using test-set confusion counts.
    Estimate(EstimateArgs),
}

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 3;

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::SlopeCurve(a) => commands::slope_curve_cmd(a),
        Command::MseDiffCurve(a) => commands::mse_diff_cmd(a),
        Command::BoundaryCurve(a) => commands::boundary_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Verify(a) => commands::verify_cmd(a),
        Command::Estimate(a) => commands::estimate_cmd(a),
    }
}

fn emit(cli: &Cli, report: &Report) -> io::Result<()> {
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    output::write(&mut out, &report.meta, &report.table, cli.format)?;
    out.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INVALID);
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    if report.checks_failed {
        eprintln!("verification failed: see rows with passed = false");
        return ExitCode::from(EXIT_CHECKS_FAILED);
    }
    ExitCode::SUCCESS
}
