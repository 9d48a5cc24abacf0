use thiserror::Error;

/// Errors raised by the solver, the oracle integrator and the parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda must be a finite positive real, got {0}")]
    NonPositiveLambda(f64),
    #[error("omega must be a finite positive real, got {0}")]
    NonPositiveOmega(f64),
    #[error("nu must lie in [0, 1], got {0}")]
    NuOutOfRange(f64),
    #[error("{field} must be finite, got {value}")]
    NonFinite { field: &'static str, value: f64 },
    #[error("{what}: argument {value} outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("no sign change of the angular residual for nu={nu} (g_lo={g_lo}, g_hi={g_hi})")]
    BracketFailure { nu: f64, g_lo: f64, g_hi: f64 },
    #[error("residue denominator 2s + nu*lambda*s^(nu-1) vanished (|d| = {magnitude:e})")]
    DegenerateDenominator { magnitude: f64 },
    #[error(
        "quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("oracle run needs {steps} steps, above the memory cap of {cap}")]
    MemoryCapExceeded { steps: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for input validation failures, false for numerical breakdowns.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveLambda(_)
                | Error::NonPositiveOmega(_)
                | Error::NuOutOfRange(_)
                | Error::NonFinite { .. }
                | Error::Domain { .. }
                | Error::Parse(_)
                | Error::MemoryCapExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
