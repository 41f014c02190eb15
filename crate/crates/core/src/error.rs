//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NonSquare { op: &'static str, rows: usize, cols: usize },

    #[error("{op}: dimension mismatch ({detail})")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("{op}: input contains a non-finite entry")]
    NonFinite { op: &'static str },

    #[error("{op}: matrix must not exceed {max}x{max}, got {n}x{n}")]
    TooLarge { op: &'static str, n: usize, max: usize },

    #[error("{op}: did not converge within {iterations} iterations (residual {residual:e})")]
    NonConvergence { op: &'static str, iterations: usize, residual: f64 },

    #[error("{op}: linear system is singular")]
    SingularSystem { op: &'static str },

    #[error("{op}: matrix is not Hurwitz (eigenvalue with real part {real_part})")]
    NotHurwitz { op: &'static str, real_part: f64 },

    #[error("{op}: {detail}")]
    NotPositiveDefinite { op: &'static str, detail: String },

    #[error("solve_care: no stabilizing solution found ({detail})")]
    NotStabilizable { detail: String },

    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("thrust allocation infeasible: |dT| = {requested} exceeds pair authority {limit}")]
    InfeasibleAllocation { requested: f64, limit: f64 },

    #[error("config line {line}: {detail}")]
    ConfigParse { line: usize, detail: String },

    #[error("config is missing required key `{key}`")]
    ConfigMissingKey { key: String },

    #[error("simulation produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
