use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("s = {0} lies on the branch cut (-inf, 0] of kappa_s")]
    BranchCut(num_complex::Complex64),

    #[error("quadrature tail bound {bound:e} exceeds tolerance {tol:e}")]
    QuadratureTail { bound: f64, tol: f64 },

    #[error("out of proven regime: {0}")]
    OutOfRegime(String),

    #[error("Newton iteration did not converge after {iters} steps (last residual {residual:e})")]
    NewtonDiverged { iters: usize, residual: f64 },

    #[error("winding number {winding:.4} is not close to an integer; zero too close to the rectangle boundary")]
    RectangleRejected { winding: f64 },

    #[error("no unstable spectrum located")]
    NoUnstableSpectrum,

    #[error("no exponential growth window found: {0}")]
    NoGrowthWindow(String),

    #[error("history buffer overflow at step {step} (capacity {capacity})")]
    HistoryOverflow { step: usize, capacity: usize },

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
