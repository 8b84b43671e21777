//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid static configuration (sizes, variances, code parameters).
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid runtime input (non-finite values, length mismatches).
    #[error("input error: {0}")]
    Input(String),

    /// Malformed text input; `line` is 1-based.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A Monte Carlo draw hit a measure-zero degeneracy and must be
    /// redrawn by the caller.
    #[error("degenerate draw: {0}")]
    Degenerate(String),

    /// Estimation quality is inside the perfect-CSI guard band; rate
    /// computations switch to the perfect-knowledge formula instead.
    #[error("rho = {0} is inside the perfect-CSI guard band")]
    PerfectCsiLimit(f64),

    /// A rate summand produced a non-positive variance term.
    #[error("rate denominator not positive: {0}")]
    Denominator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
