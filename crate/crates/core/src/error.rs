use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("site {site} out of range for a chain of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("shape mismatch: expected {expected}, got {found}")]
    Shape { expected: String, found: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical integrity: {0}")]
    NumericalIntegrity(String),

    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("phase classification: {0}")]
    Classification(String),

    #[error("register too large: {0}")]
    Resource(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("incomparable data: {0}")]
    Comparison(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
