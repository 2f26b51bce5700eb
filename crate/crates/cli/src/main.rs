//! `clmap`: command-line front end for the classical-map library.
//!
//! Each run writes its tables plus `<subcommand>.manifest.json`; `replay`
//! re-runs a manifest. Exit codes: 0 success, 2 invalid input, 3 numerical
//! failure. Errors go to stderr as one JSON object.

mod commands;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::Command;
use output::{read_manifest, write_run, CliError};

#[derive(Parser, Debug)]
#[command(
    name = "clmap",
    version,
    about = "Classical-map integral equations for electron fluids"
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "CLMAP_OUT_DIR", default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    #[command(flatten)]
    Run(Command),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct ReplayArgs {
    manifest: PathBuf,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let command = match cli.cmd {
        Cmd::Run(c) => c,
        Cmd::Replay(r) => read_manifest(&r.manifest)?.command,
    };
    let start = Instant::now();
    let output = command.run()?;
    let summary = output.summary.clone();
    let manifest = write_run(&cli.out, &command, output, start.elapsed().as_secs_f64())?;
    // a closed pipe on stdout is not a failure of the run
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{summary}");
    let _ = writeln!(stdout, "manifest: {}", manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            _ => {
                let err = CliError::validation(e.render().to_string().trim().to_string());
                eprintln!("{}", err.to_json());
                return ExitCode::from(err.exit_code);
            }
        },
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code)
        }
    }
}
