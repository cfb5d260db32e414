//! Batch front door for the `cylkam` binary.
//!
//! Every numeric choice lives in a JSON config; flags only pick the config,
//! the output directory and verbosity.
//!
//! ```text
//! cylkam kam --config run.json --out runs/kam
//! ```
//!
//! Exit codes: 0 success, 2 hypothesis violation, 3 numerical failure or
//! non-convergence, 4 configuration error.

mod config;
mod execute;

use std::path::PathBuf;

use clap::Parser;

pub use config::{load_config, parse_config, DioSpec, MapsPayload, Payload, RunConfig, SemiSpec, Subcommand};
pub use execute::{config_hash, execute, exit_code, Outcome, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_NUMERICAL, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "cylkam", version, about = "Simultaneous linearization of commuting cylinder maps")]
pub struct Cli {
    pub subcommand: Subcommand,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Only warnings and errors on stderr, nothing on stdout.
    #[arg(long)]
    pub quiet: bool,
}

/// Output directory when neither `--out` nor `output_dir` is given.
pub const DEFAULT_OUT: &str = "cylkam-out";

/// Runs the parsed command line and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let config = match load_config(&cli.config, cli.subcommand) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cylkam: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT).join(cli.subcommand.key()));
    match execute(&config, Some(&out)) {
        Ok(o) => {
            if !cli.quiet {
                let status = o.report.get("status").map_or_else(String::new, summary);
                println!("{} {status} exit={} out={}", cli.subcommand.key(), o.code, out.display());
            }
            if let Some(err) = o.report.get("error").and_then(|e| e.as_str()) {
                eprintln!("cylkam: {err}");
            }
            o.code
        }
        Err(e) => {
            eprintln!("cylkam: {e}");
            exit_code(&e)
        }
    }
}

fn summary(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Object(o) => match (o.get("status"), o.get("detail")) {
            (Some(s), Some(d)) => format!("{}({})", summary(s), summary(d)),
            (Some(s), None) => summary(s),
            _ => v.to_string(),
        },
        other => other.to_string(),
    }
}
