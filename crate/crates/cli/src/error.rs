use std::fmt;

use ab_core::Error as CoreError;

/// Failure of a CLI verb, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    /// A checked invariant exceeded its tolerance.
    Invariant(String),
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                CoreError::QuadratureFailure { .. }
                | CoreError::SolverFailure { .. }
                | CoreError::SingularPoint(_)
                | CoreError::SingularityHit { .. } => 3,
                CoreError::Timeout { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant failed: {m}"),
            CliError::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
