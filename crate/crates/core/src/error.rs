use thiserror::Error;

use crate::qstate::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("dimension {dim} exceeds the configured maximum of {max}")]
    DimensionCap { dim: usize, max: usize },

    #[error("{0}")]
    Domain(String),

    #[error("degenerate target: Tr(rho_T^2) = {0:e}")]
    DegenerateTarget(f64),

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("invalid density matrix: {}", format_violations(.0))]
    InvalidDensity(Vec<Violation>),

    #[error("Poisson tail {tail:e} beyond n_max = {n_max} exceeds tolerance; need n_max >= {required}")]
    Truncation { n_max: usize, required: usize, tail: f64 },

    #[error("undefined ratio: {0}")]
    UndefinedRatio(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("bisection did not converge after {0} steps")]
    NonConvergence(usize),

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
