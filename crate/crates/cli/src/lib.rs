//! Command-line front end for the `anticross` library.
//!
//! Every output file starts with a metadata block (tool version, resolved
//! model configuration, seed and Rabi Δ convention) so a run can be repeated
//! exactly. Exit codes: 0 success, 2 configuration error, 3 degenerate or
//! non-identifiable setup, 4 I/O failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use error::CliError;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ANTICROSS_THREADS";

/// Sizes the global thread pool from `ANTICROSS_THREADS`, if set.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(text) = value else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::QfiScan(a) => commands::qfi_scan(a),
        Command::GSurface(a) => commands::g_surface(a),
        Command::ThermalScan(a) => commands::thermal_scan(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::ModelValidate(a) => commands::model_validate(a),
    }
}
