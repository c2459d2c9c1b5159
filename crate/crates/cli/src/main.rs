//! `realign`: separability criteria, entanglement bounds and reproduction runs
//! from the command line.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical error,
//! 4 no verdict change across a scan bracket, 5 reproduction deviation.

mod commands;
mod error;
mod report;
mod state_file;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{BoundArgs, DetectArgs, ExportArgs, OptimizeArgs, ReproduceArgs, ScanArgs};
use error::{usage, CliResult};
use report::RunReport;

#[derive(Parser)]
#[command(name = "realign", version, about = "Realignment-based entanglement detection")]
struct Cli {
    /// Emit the run report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Emit scan rows as CSV
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate separability criteria on one state
    Detect(DetectArgs),
    /// Bisect a state family for the parameter where a criterion starts detecting
    Scan(ScanArgs),
    /// Lower bounds on concurrence, CREN or GME concurrence
    Bound(BoundArgs),
    /// Search for mu and nu that maximize the Q-criterion margin
    Optimize(OptimizeArgs),
    /// Recompute the reference examples and compare
    Reproduce(ReproduceArgs),
    /// Write a builtin or file state as a state file
    Export(ExportArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| usage(format!("THREADS='{raw}' is not a positive integer")))?;
    if n == 0 {
        return Err(usage("THREADS must be positive"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("cannot size thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<commands::Output> {
    configure_threads()?;
    match &cli.command {
        Command::Detect(a) => commands::run_detect(a),
        Command::Scan(a) => commands::run_scan(a),
        Command::Bound(a) => commands::run_bound(a),
        Command::Optimize(a) => commands::run_optimize(a),
        Command::Reproduce(a) => commands::run_reproduce(a),
        Command::Export(a) => commands::run_export(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            return ExitCode::from(e.exit_code());
        }
    };
    let report = RunReport {
        command: std::env::args().skip(1).collect(),
        digest: output.digest,
        items: output.items,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = if cli.json {
        serde_json::to_string_pretty(&report).expect("reports serialize")
    } else if cli.csv {
        report.csv()
    } else {
        report.human()
    };
    // A closed pipe downstream (e.g. `| head`) is not an error of the run.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if output.deviations.is_empty() {
        ExitCode::SUCCESS
    } else {
        for d in &output.deviations {
            eprintln!("deviation: {d}");
        }
        ExitCode::from(5)
    }
}
