//! Complex log-gamma on the principal branch.
//!
//! Stirling's asymptotic series is used once `|z| >= 15` away from the
//! negative real axis; everything else is shifted up with the recurrence
//! `ln Γ(z) = ln Γ(z + n) - Σ ln(z + k)`. Summing principal logarithms term by
//! term (rather than taking the log of the product) yields the analytic
//! continuation from the positive real axis, with the cut on the negative axis.

use num_complex::Complex64;

use super::SpecfunError;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_MIN: f64 = 15.0;
const POLE_TOL: f64 = 1e-12;

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=10`.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// True when `z` lies within `tol` of a non-positive integer.
pub(crate) fn is_nonpositive_integer(z: Complex64, tol: f64) -> bool {
    z.im.abs() < tol && z.re < 0.5 && (z.re - z.re.round()).abs() < tol
}

/// Principal branch of `ln Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecfunError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecfunError::NonFinite);
    }
    if is_nonpositive_integer(z, POLE_TOL) {
        return Err(SpecfunError::Pole(z));
    }

    let mut shifted = z;
    let mut log_shift = Complex64::new(0.0, 0.0);
    if z.re < 0.0 || z.norm() < STIRLING_MIN {
        let n = (STIRLING_MIN - z.re).ceil().max(0.0) as usize;
        for k in 0..n {
            log_shift += (z + k as f64).ln();
        }
        shifted = z + n as f64;
    }
    Ok(stirling(shifted) - log_shift)
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for coeff in STIRLING_COEFFS {
        series += power * coeff;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// `Π Γ(num_i) / Π Γ(den_j)` through log-gamma sums.
///
/// A pole in the denominator makes the ratio vanish; a pole in the numerator
/// is reported as [`SpecfunError::Pole`].
pub(crate) fn gamma_ratio(num: &[Complex64], den: &[Complex64]) -> Result<Complex64, SpecfunError> {
    let mut log = Complex64::new(0.0, 0.0);
    for &z in den {
        if is_nonpositive_integer(z, POLE_TOL) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log -= ln_gamma(z)?;
    }
    for &z in num {
        log += ln_gamma(z)?;
    }
    Ok(log.exp())
}
