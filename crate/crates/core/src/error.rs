use thiserror::Error;

use crate::point::ComplexPoint;

pub type Result<T> = std::result::Result<T, ZetaError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ZetaError {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// The series representation does not converge fast enough this close to `σ = 1`.
    #[error("σ = {sigma} is below the series margin {limit}; use the continuation evaluator instead")]
    SeriesMargin { sigma: f64, limit: f64 },

    #[error("s = 1 is a pole of the zeta function")]
    Pole,

    #[error("critical strip S_{m}^{k} does not exist")]
    NoStrip { m: u32, k: u32 },

    #[error("zero on contour near {point} (|f| = {modulus:e}, local scale {scale:e})")]
    ZeroOnContour {
        point: ComplexPoint,
        modulus: f64,
        scale: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no convergence after {iterations} iterations; best iterate {best}")]
    NonConvergence { best: ComplexPoint, iterations: u32 },

    #[error("unexpected winding count {count} for cell (M={m}, k={k}, j={j})")]
    UnexpectedCount { m: u32, k: u32, j: u32, count: i64 },
}

impl ZetaError {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        ZetaError::Domain {
            op,
            reason: reason.into(),
        }
    }
}
