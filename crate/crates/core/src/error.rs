use thiserror::Error;

/// Errors raised by the numerical and symbolic routines of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("orbit reached a cusp (rational endpoint): {0}")]
    Cusp(String),

    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("transfer operator diverges: {0}")]
    Divergent(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("root bracket failed: P({lo}) = {p_lo:.6e}, P({hi}) = {p_hi:.6e}")]
    Bracket { lo: f64, hi: f64, p_lo: f64, p_hi: f64 },

    #[error("beta = {beta} is inadmissible: uniqueness bound for N = {n} is {bound:.6}")]
    Inadmissible { beta: f64, n: u64, bound: f64 },

    #[error("matrix with even determinant does not act on P1(F2)")]
    EvenDeterminant,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
