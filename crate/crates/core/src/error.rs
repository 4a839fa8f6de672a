use thiserror::Error;

/// Errors shared across the comparison-geometry modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid or non-finite input parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A function was evaluated outside its mathematical domain.
    #[error("domain violation: {0}")]
    Domain(String),

    /// The adaptive ODE integrator failed before reaching its target.
    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },

    /// Adaptive quadrature did not converge; carries the failing subinterval.
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },

    /// A precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A geodesic or ODE trajectory left the spacetime's t-interval.
    #[error("trajectory left the t-interval at t = {0}")]
    DomainExit(f64),

    /// An optimization or root search did not converge.
    #[error("search did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
