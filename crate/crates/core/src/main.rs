use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use islands::harness::{self, HarnessError, RunOptions};

/// Coupled-mode, photon-counting and tomography experiments.
#[derive(Parser)]
#[command(name = "islands", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and write a run directory.
    Run {
        config: PathBuf,
        /// Run directory; defaults to the config's `output_dir`, then
        /// `$ISLANDS_OUTPUT_ROOT/<config stem>`, then `runs/<config stem>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace an earlier run in the same directory.
        #[arg(long)]
        force: bool,
    },
    /// Validate a clickstream v1 file.
    Ingest {
        file: PathBuf,
        /// Print event counts, rates and waiting-time tests.
        #[arg(long)]
        summary: bool,
        #[arg(long)]
        json: bool,
    },
    /// Summarize a run directory.
    Report {
        run_dir: PathBuf,
        /// Standard errors required before calling a departure significant.
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.one_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { config, out, force } => {
            let outcome = harness::run(&config, &RunOptions { out, force })?;
            println!("{}", outcome.dir.display());
        }
        Command::Ingest { file, summary, json } => {
            let stream = harness::ingest(&file)?;
            let digest = harness::ingest_summary(&stream);
            if json {
                println!("{}", serde_json::to_string_pretty(&digest).expect("summary serializes"));
            } else if summary {
                print!("{}", digest.lines().join("\n") + "\n");
            } else {
                println!("{}", digest.lines()[0]);
            }
        }
        Command::Report { run_dir, sigma, json } => {
            let report = harness::report(&run_dir, sigma)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.text());
            }
        }
    }
    Ok(())
}
