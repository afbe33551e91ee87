use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nclift::problem::Problem;
use nclift::report::{run, Command, RunError, RunOptions};

/// Universal lifts of complexes over truncated non-commutative power series.
#[derive(Parser, Debug)]
#[command(name = "nclift", version)]
struct Cli {
    /// ext, lift, relations, abelianize, family, smallext, rho or selfcheck
    #[arg(value_parser = parse_command)]
    command: Command,
    /// Problem file (JSON, schema 1)
    problem: PathBuf,
    /// Truncation order N [default: options.order, else 4]
    #[arg(long)]
    order: Option<usize>,
    /// Ground field, `q` or `gfP`; overrides the problem file
    #[arg(long)]
    field: Option<String>,
    /// Guard order for small extensions [default: N+2]
    #[arg(long)]
    guard: Option<usize>,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
}

fn parse_command(s: &str) -> Result<Command, String> {
    s.parse()
}

fn execute(cli: &Cli) -> Result<nclift::report::Report, RunError> {
    let problem = Problem::from_path(&cli.problem)?;
    let opts = RunOptions::resolve(&problem, cli.field.as_deref(), cli.order, cli.guard)?;
    run(cli.command, &problem, &opts)
}

// A closed pipe (`nclift ... | head`) is not an error worth a panic.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            if cli.json {
                emit(&format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serializes")));
            } else {
                emit(&report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {} reported a failed check", cli.command.name());
                ExitCode::from(2)
            }
        }
        Err(e) => {
            if cli.json {
                let err = serde_json::json!({ "error": e.to_json() });
                emit(&format!("{}\n", serde_json::to_string_pretty(&err).expect("serializes")));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
