use thiserror::Error;

use crate::dsl::ParseError;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite sample {value} at node (x = {x}, y = {y})")]
    Sampling { x: f64, y: f64, value: f64 },

    #[error("y = {y} lies outside the interval [{lo}, {hi}]")]
    Domain { y: f64, lo: f64, hi: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resonant mode m = {m}: small divisor {divisor:e} below threshold")]
    Resonance { m: i64, divisor: f64 },

    #[error("alpha = {alpha} is within 1e-12 of the rational {p}/{q}")]
    Degenerate { alpha: f64, p: i64, q: i64 },

    #[error("alpha = {alpha} fails the Diophantine condition at m = {m}")]
    NotDiophantine { alpha: f64, m: i64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("image escapes domain at ({x}, {y}): {detail}")]
    Range { x: f64, y: f64, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("periodicity audit failed: |e(0,y) - e(1,y)| = {gap:e} at y = {y}")]
    Periodicity { y: f64, gap: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
