//! Numerical toolkit for fractional powers of the Dirichlet Laplacian on the
//! positive integers: explicit kernel matrix elements, Riesz potentials and
//! Green functions, Hardy-weight families with their critical constants,
//! criticality diagnostics (ground-state representation, null-sequences,
//! weighted eigenvalue bounds), and residual verification of the underlying
//! Gamma-function identities.

pub mod cli;
pub mod criticality;
pub mod error;
pub mod hardy_weights;
pub mod kernel;
pub mod riesz;
pub mod special_fn;
pub mod verification;

pub use error::{Error, Result};
