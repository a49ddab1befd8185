//! Error types shared across the analysis engine and simulator.

use thiserror::Error;

/// Top-level error for every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or parameter value failed validation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A numerical routine failed to converge or produced a non-finite value.
    /// `context` identifies the module, operation and offending inputs.
    #[error("numeric failure in {context}: {reason}")]
    Numeric { context: String, reason: String },

    /// A (link, slot, scheme) combination that the frame structure forbids.
    #[error("infeasible query: {0}")]
    InfeasibleQuery(String),

    /// Monte Carlo window too small for the requested densities.
    #[error("simulation window too small: {0}")]
    WindowTooSmall(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn numeric(context: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
