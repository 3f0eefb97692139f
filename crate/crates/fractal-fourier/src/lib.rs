//! Command-line front end for `fractal-fourier-core`: parallel sampling,
//! CSV and SVG output, and configuration handling.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod parallel;
pub mod svg;

pub use config::{Cli, RunConfig};
pub use error::{CliError, Result};

use std::io::Write;

/// Runs a parsed command line and writes its output.
pub fn execute(cli: Cli) -> Result<()> {
    let cfg = RunConfig::from_cli(cli)?;
    let text = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
