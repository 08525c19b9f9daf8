//! Scenario runner for the `noon-lab` command.
//!
//! Each scenario maps a configuration to one report, written as CSV or JSON.
//! Output is a pure function of the configuration (and `NOON_LAB_NCAP`), so
//! re-runs are byte-identical.

pub mod config;
pub mod format;
pub mod scenarios;

use std::path::Path;

use thiserror::Error;

pub use config::{
    build_config, parse_param, ConfigError, ConfigFile, OutputFormat, Scalar, Scenario,
    ScenarioConfig,
};
pub use scenarios::run_scenario;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status when a computation fails.
pub const EXIT_COMPUTATION: i32 = 1;
/// Exit status for unusable configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(#[from] noon_core::Error),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    /// Parameter errors raised by the simulator count as configuration errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Compute(noon_core::Error::Parameter(_)) => EXIT_CONFIG,
            CliError::Compute(_) | CliError::Output(_) => EXIT_COMPUTATION,
        }
    }
}

/// Resolves the configuration from the command-line pieces and runs it.
pub fn run(
    scenario: &str,
    config_path: Option<&Path>,
    params: &[String],
    format: Option<&str>,
) -> Result<String, CliError> {
    let text = match config_path {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let config = build_config(scenario, text.as_deref(), params, format)?;
    run_scenario(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            CliError::Config(ConfigError("x".into())).exit_code(),
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::Compute(noon_core::Error::Parameter("x".into())).exit_code(),
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::Compute(noon_core::Error::SingularPoint { phi: 0.0 }).exit_code(),
            EXIT_COMPUTATION
        );
    }
}
