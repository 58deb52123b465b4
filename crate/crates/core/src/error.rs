use std::path::PathBuf;

use thiserror::Error;

use crate::linalg::EigenPairs;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition (dimensions, unit norms, ranges).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver did not converge after {restarts} restarts (worst residual {worst_residual:.3e})")]
    NotConverged {
        restarts: usize,
        worst_residual: f64,
        best: Box<EigenPairs>,
    },

    #[error("degenerate spectrum: gap {gap:.3e} below tolerance {gap_tol:.3e}")]
    DegenerateSpectrum { gap: f64, gap_tol: f64 },

    #[error("learning step {step}: {source}")]
    Learning {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
