//! Complex special functions needed by the interior solution: log-gamma and
//! the Gauss hypergeometric function with its derivative.
//!
//! Everything here is a pure function of its arguments.

mod gamma;
mod hyp2f1;

use num_complex::Complex64;
use thiserror::Error;

pub use gamma::ln_gamma;
pub use hyp2f1::{gauss_2f1, gauss_2f1_derivative, HypergeometricArgs, MAX_TERMS};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("log-gamma pole at z = {0}")]
    Pole(Complex64),
    #[error("no evaluation strategy converged within {0} terms")]
    NonConvergence(usize),
    #[error("degenerate hypergeometric parameters: {0}")]
    DegenerateParameters(String),
    #[error("non-finite argument")]
    NonFinite,
}

/// Internal evaluation routes, exposed for cross-checking one route against
/// another.
#[doc(hidden)]
pub mod routes {
    use super::{Complex64, SpecfunError};

    pub fn maclaurin(a: Complex64, b: Complex64, c: Complex64, y: Complex64) -> Result<Complex64, SpecfunError> {
        super::hyp2f1::maclaurin(a, b, c, y)
    }

    pub fn via_one_minus(a: Complex64, b: Complex64, c: Complex64, y: Complex64) -> Result<Complex64, SpecfunError> {
        super::hyp2f1::via_one_minus(a, b, c, y)
    }

    pub fn ode_continuation(a: Complex64, b: Complex64, c: Complex64, y: Complex64) -> Result<Complex64, SpecfunError> {
        super::hyp2f1::continue_along_ray(a, b, c, y).map(|(f, _)| f)
    }
}
