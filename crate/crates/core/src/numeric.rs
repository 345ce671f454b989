//! Transfer-matrix oracle.
//!
//! A [`ProfileGrid`] is treated as a stack of homogeneous layers. In layer `j`
//! the solution is `A e^{ik(z - e_j)} + B e^{-ik(z - e_j)}` with
//! `k = √(2m(E - V))`, amplitudes referenced to the layer's left edge `e_j`.
//! Continuity of `ψ` and `ψ'/m` at each interface gives, going right to left,
//!
//! ```text
//! S = A' + B',   D = (k'/m') / (k/m) · (A' - B')
//! A = (S + D)/2 · e^{-ikd},   B = (S - D)/2 · e^{ikd}
//! ```
//!
//! starting from a pure outgoing wave `(1, 0)` in the right half-space.
//! Amplitudes are rescaled whenever they exceed `1e150`, with the scale kept
//! as a logarithm, so deep evanescent stacks do not overflow.
//!
//! Right incidence is left incidence on the mirrored stack.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{sample_profile, Incidence, ModelError, ModelParams, ProfileGrid};

/// Exterior padding used when the oracle samples a model profile itself.
pub const DEFAULT_PADDING: f64 = 2.0;
/// Largest slice count [`converge`] will try.
pub const MAX_SLICES: usize = 1_000_000;

const RESCALE_AT: f64 = 1e150;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("energy {energy} does not propagate in the exterior medium")]
    Evanescent { energy: f64 },
    #[error("transfer amplitudes overflowed at slice {slice}")]
    Overflow { slice: usize },
    #[error("relative change {error:e} between {n} and {} slices exceeds tolerance {tol:e}", 2 * n)]
    NotConverged { n: usize, error: f64, tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferResult {
    pub r: Complex64,
    pub t: Complex64,
    pub r2: f64,
    pub t2: f64,
    /// Interior slice count of the run the amplitudes come from.
    pub n_slices: usize,
    /// Largest relative change of `|R|²`, `|T|²` against the half-resolution
    /// run; zero for a single run.
    pub richardson_error: f64,
}

/// Local wavenumber with `Im k >= 0` (and `Re k >= 0` on the real axis).
fn wavenumber(m: f64, v: Complex64, energy: f64) -> Complex64 {
    let k = ((energy - v) * (2.0 * m)).sqrt();
    if k.im < 0.0 || (k.im == 0.0 && k.re < 0.0) {
        -k
    } else {
        k
    }
}

/// Amplitudes for a single stack. Every slice of `grid` is a layer; the outer
/// slices extend to infinity.
pub fn transfer_scatter(grid: &ProfileGrid, energy: f64, incidence: Incidence) -> Result<TransferResult, NumericError> {
    match incidence {
        Incidence::Left => scatter_from_left(grid, energy),
        Incidence::Right => scatter_from_left(&grid.mirrored(), energy),
    }
}

fn scatter_from_left(grid: &ProfileGrid, energy: f64) -> Result<TransferResult, NumericError> {
    let n = grid.len();
    let e = &grid.edges;
    let k_left = wavenumber(grid.m[0], grid.v[0], energy);
    let k_right = wavenumber(grid.m[n - 1], grid.v[n - 1], energy);
    for (km, v) in [(k_left, grid.v[0]), (k_right, grid.v[n - 1])] {
        if v.im != 0.0 || km.im != 0.0 || km.re <= 0.0 {
            return Err(NumericError::Evanescent { energy });
        }
    }
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let (mut a, mut b) = (one, Complex64::new(0.0, 0.0));
    let mut log_scale = 0.0;
    let mut k_next = k_right;
    let mut m_next = grid.m[n - 1];
    for j in (0..n - 1).rev() {
        let k = wavenumber(grid.m[j], grid.v[j], energy);
        let ratio = (k_next / m_next) / (k / grid.m[j]);
        let s = a + b;
        let d = ratio * (a - b);
        let phase = (i * k * (e[j + 1] - e[j])).exp();
        a = (s + d) * 0.5 / phase;
        b = (s - d) * 0.5 * phase;
        let big = a.norm().max(b.norm());
        if !big.is_finite() {
            return Err(NumericError::Overflow { slice: j });
        }
        if big > RESCALE_AT {
            a /= big;
            b /= big;
            log_scale += big.ln();
        }
        k_next = k;
        m_next = grid.m[j];
    }
    let r = b * (2.0 * i * k_left * e[0]).exp() / a;
    let t = (i * k_left * e[0] - i * k_right * e[n - 1] - log_scale).exp() / a;
    if ![r, t].iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        return Err(NumericError::Overflow { slice: 0 });
    }
    Ok(TransferResult {
        r,
        t,
        r2: r.norm_sqr(),
        t2: t.norm_sqr(),
        n_slices: n.saturating_sub(2),
        richardson_error: 0.0,
    })
}

fn relative_change(coarse: &TransferResult, fine: &TransferResult) -> f64 {
    let rel = |x: f64, y: f64| {
        if x == y {
            0.0
        } else {
            (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
        }
    };
    rel(coarse.r2, fine.r2).max(rel(coarse.t2, fine.t2))
}

/// Runs the model profile at `n` and `2n` interior slices and returns the
/// finer result with the observed relative change as its error estimate.
pub fn richardson_check(
    params: &ModelParams,
    energy: f64,
    incidence: Incidence,
    n: usize,
) -> Result<TransferResult, NumericError> {
    let coarse = transfer_scatter(&sample_profile(params, n, DEFAULT_PADDING)?, energy, incidence)?;
    let mut fine = transfer_scatter(&sample_profile(params, 2 * n, DEFAULT_PADDING)?, energy, incidence)?;
    fine.richardson_error = relative_change(&coarse, &fine);
    Ok(fine)
}

/// Doubles the slice count from `n_start` until the Richardson error drops
/// below `tol`.
pub fn converge(
    params: &ModelParams,
    energy: f64,
    incidence: Incidence,
    n_start: usize,
    tol: f64,
) -> Result<TransferResult, NumericError> {
    let mut n = n_start;
    let mut previous = transfer_scatter(&sample_profile(params, n, DEFAULT_PADDING)?, energy, incidence)?;
    loop {
        let mut next = transfer_scatter(&sample_profile(params, 2 * n, DEFAULT_PADDING)?, energy, incidence)?;
        next.richardson_error = relative_change(&previous, &next);
        if next.richardson_error <= tol {
            return Ok(next);
        }
        if 2 * n >= MAX_SLICES {
            return Err(NumericError::NotConverged { n, error: next.richardson_error, tol });
        }
        n *= 2;
        previous = next;
    }
}
