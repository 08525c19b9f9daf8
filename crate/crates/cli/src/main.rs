use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use noon_lab::{run, EXIT_COMPUTATION};

/// Simulated N00N-state interferometry scenarios.
#[derive(Parser, Debug)]
#[command(name = "noon-lab", version)]
struct Args {
    /// fringe, hom, herald-gc, herald-lkd, loss-sweep, opa-visibility, sensitivity or limits
    scenario: String,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario parameter as key=value (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = match run(
        &args.scenario,
        args.config.as_deref(),
        &args.params,
        args.format.as_deref(),
    ) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("noon-lab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &args.out {
        Some(path) => std::fs::write(path, &report)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{report}");
            Ok(())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("noon-lab: {msg}");
            ExitCode::from(EXIT_COMPUTATION as u8)
        }
    }
}
