use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the two coupled regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    A,
    B,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::A => f.write_str("A"),
            Region::B => f.write_str("B"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite population at step {step}: {values:?}")]
    Divergence { step: u64, values: Vec<f64> },

    #[error("region {0} has no mass left to normalize")]
    ExtinctRegion(Region),

    #[error("conflict normalizer z = {z} is degenerate{}", fmt_iteration(*.iteration))]
    DegenerateNormalizer { z: f64, iteration: Option<u64> },

    #[error("difference profile is degenerate: p and r coincide")]
    DegenerateProfile,

    #[error("equilibrium terms are degenerate (Z1 = {z1}, Z2 = {z2})")]
    DegenerateTerms { z1: f64, z2: f64 },

    #[error("no interior equilibrium for these parameters")]
    NoInteriorEquilibrium,

    #[error(
        "Newton solver did not converge after {iterations} iterations (residual {residual:e})"
    )]
    SolverFailure {
        best: [f64; 4],
        residual: f64,
        iterations: usize,
    },

    #[error("invalid bracket: both endpoints classify as {0}")]
    InvalidBracket(String),

    #[error("attractor undetermined at alpha = {alpha}")]
    UndeterminedMidpoint { alpha: f64 },

    #[error("attractive iteration did not settle after {iterations} iterations")]
    UndeterminedSupport { iterations: u64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },

    #[error("integrity: {0}")]
    Integrity(String),

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

fn fmt_iteration(it: Option<u64>) -> String {
    match it {
        Some(n) => format!(" at iteration {n}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what: what.into(),
            reason: reason.into(),
        }
    }

    /// Whether the error comes from the numerics rather than from inputs or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::ExtinctRegion(_)
                | Error::DegenerateNormalizer { .. }
                | Error::DegenerateProfile
                | Error::DegenerateTerms { .. }
                | Error::NoInteriorEquilibrium
                | Error::SolverFailure { .. }
                | Error::InvalidBracket(_)
                | Error::UndeterminedMidpoint { .. }
                | Error::UndeterminedSupport { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
