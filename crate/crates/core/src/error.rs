use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which side of a volume-constrained box program cannot be met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfeasibleSide {
    /// The lower bounds alone already exceed the target volume.
    Lower,
    /// The upper bounds cannot reach the target volume.
    Upper,
}

impl std::fmt::Display for InfeasibleSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfeasibleSide::Lower => f.write_str("lower bounds exceed target volume"),
            InfeasibleSide::Upper => f.write_str("upper bounds cannot reach target volume"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("solver failure: {reason} (residual norm {residual:.3e})")]
    SolverFailure { reason: String, residual: f64 },

    #[error("infeasible subproblem: {side} (target {target:.6e}, reachable {reachable:.6e})")]
    Infeasible {
        side: InfeasibleSide,
        target: f64,
        reachable: f64,
    },

    #[error("volume multiplier not found: relative volume error {relative_error:.3e}")]
    MultiplierNotFound { relative_error: f64 },

    #[error("interpolation mode error: {0}")]
    Mode(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// `line` is 1-based; 0 means the command line.
    #[error("config error {}: {message}", config_origin(*line))]
    Config { line: usize, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

fn config_origin(line: usize) -> String {
    if line == 0 {
        "on the command line".to_string()
    } else {
        format!("at line {line}")
    }
}
