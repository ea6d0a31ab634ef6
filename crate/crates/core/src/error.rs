use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid mask: {0}")]
    InvalidMask(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("point set is empty")]
    EmptySet,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "linear solver did not converge: relative residual {residual:.3e} > {tolerance:.1e} after {iterations} iterations"
    )]
    SolverDivergence {
        residual: f64,
        tolerance: f64,
        iterations: usize,
    },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("eigensolver did not converge: Rayleigh quotient change {change:.3e} after {iterations} iterations")]
    EigenNoConvergence { change: f64, iterations: usize },

    #[error("initial mask is not admissible: {0}")]
    InfeasibleInit(String),

    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(String),

    #[error("rate fit needs at least {needed} positive points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("perturbation {index} is not admissible")]
    InadmissiblePerturbation { index: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical pipeline (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SolverDivergence { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::EigenNoConvergence { .. }
        )
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
