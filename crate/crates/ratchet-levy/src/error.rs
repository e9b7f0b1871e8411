//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by model construction, scale-function evaluation,
/// valuation, and simulation.
#[derive(Debug, Clone, Error)]
pub enum LevyError {
    /// The Laplace exponent is degenerate and has no root at the requested level.
    #[error("no root: {0}")]
    NoRoot(String),
    /// The requested backend cannot evaluate scale functions for this model.
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    /// Adaptive quadrature did not meet its tolerance within the refinement budget.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    /// Initial surplus lies outside the region a formula is valid for.
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    /// Strategy parameters violate an invariant.
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    /// Model parameters violate an invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),
    /// A scalar argument violates an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Simulation configuration violates an invariant.
    #[error("config error: {0}")]
    ConfigError(String),
    /// Numerical transform inversion failed its residual check.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, LevyError>;
