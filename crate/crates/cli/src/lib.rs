//! Config-driven front end for the `ab-core` experiments: loads TOML
//! configs, runs the verbs and writes reproducible result files.

pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use commands::Context;
pub use config::{ExperimentConfig, Mode};
pub use error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the configured worker count.
pub const WORKERS_ENV: &str = "AB_SIM_WORKERS";

/// Worker count by precedence: flag, environment, config, machine.
pub fn resolve_workers(
    flag: Option<usize>,
    env: Option<&str>,
    config: Option<usize>,
) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(CliError::Config("--workers: must be ≥ 1".into()))
        } else {
            Ok(n)
        };
    }
    if let Some(v) = env.filter(|v| !v.trim().is_empty()) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("{WORKERS_ENV}: expected a positive integer, got `{v}`"))),
        };
    }
    Ok(config.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_precedence() {
        assert_eq!(resolve_workers(Some(3), Some("5"), Some(7)).unwrap(), 3);
        assert_eq!(resolve_workers(None, Some("5"), Some(7)).unwrap(), 5);
        assert_eq!(resolve_workers(None, None, Some(7)).unwrap(), 7);
        assert_eq!(resolve_workers(None, Some(""), Some(7)).unwrap(), 7);
        assert!(resolve_workers(None, None, None).unwrap() >= 1);
        assert_eq!(resolve_workers(None, Some("x"), None).unwrap_err().exit_code(), 2);
        assert_eq!(resolve_workers(Some(0), None, None).unwrap_err().exit_code(), 2);
    }
}
