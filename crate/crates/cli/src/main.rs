//! Batch front end for the star-graph experiment library.
//!
//! Reads a TOML run configuration, executes one experiment (possibly as a
//! sweep over `hbar` and a list of times), and writes CSV rows plus a JSON
//! summary into the output directory.
//!
//! Exit codes: 0 when every bound check passed, 1 when at least one check
//! failed, 2 for configuration or guard errors.

mod config;
mod output;
mod run;

use clap::Parser;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "starwave", version, about = "Star-graph wave-packet experiment runner")]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: run::Experiment,

    /// Path to the TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,

    /// Output directory; overrides the configured one.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Grid point count; overrides the configured one.
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,

    /// Planck constant; repeat the flag to sweep. Overrides the configured
    /// value or sweep.
    #[arg(long = "hbar")]
    pub hbar: Vec<f64>,
}

fn main() {
    let cli = Cli::parse();
    match run::execute(&cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(message) => {
            eprintln!("{message}");
            std::process::exit(2);
        }
    }
}
