use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Gamma pole in a numerator position, where the expression diverges.
    #[error("gamma pole in numerator at {0}")]
    NumeratorPole(f64),
    /// Numerator and denominator gamma poles coincide; the limit is not
    /// resolved numerically.
    #[error("indeterminate gamma pole configuration at {0}")]
    IndeterminatePole(f64),
    /// Function evaluated at a pole.
    #[error("pole at {0}")]
    Pole(f64),
    /// Argument outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge: value {value}, error estimate {err_estimate}, tolerance {tol}")]
    NoConvergence {
        value: f64,
        err_estimate: f64,
        tol: f64,
    },
    /// Parameters put a Gamma argument at a pole in an identity where the
    /// two sides only make sense away from poles.
    #[error("pole configuration: {0}")]
    PoleConfiguration(String),
    /// A truncation policy cannot certify the requested tail tolerance.
    #[error("truncation policy rejected: {0}")]
    PolicyRejected(String),
    /// Two supposedly equivalent evaluation paths disagree beyond tolerance.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
