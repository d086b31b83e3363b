use alloc::vec::Vec;

/// Failures raised by the solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("no convergence after {iterations} iterations (last iterate {last})")]
    Convergence { iterations: usize, last: f64 },
    #[error("fixed point not reached after {iterations} iterations (residual {residual:e})")]
    FixedPoint {
        iterations: usize,
        residual: f64,
        last: Vec<f64>,
    },
    #[error("non-finite derivative at t = {t}")]
    Singular { t: f64 },
    #[error("singular linear system")]
    SingularMatrix,
    #[error("degenerate problem: {0}")]
    Degenerate(&'static str),
    #[error("no crossing found below {limit}")]
    NotFound { limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
