//! Closed-form scattering solution.
//!
//! With `y = (1 + iz)/2` the interior equation reduces to the hypergeometric
//! equation, and every interior solution has the form
//!
//! ```text
//! ψ(z) = G(z) u(y),    G(z) = β^{1/2} 2^{-(p+q)} (1 + iz)^{p-1/4} (1 - iz)^{q-1/4}
//! ```
//!
//! with `u` in the solution space of `₂F₁(a, b; c; y)`. The default basis is
//!
//! ```text
//! u1 = F(a, b; c; y),    u2 = F(a, b; a+b-c+1; 1-y),
//! ```
//!
//! the solutions regular at `y = 0` and at `y = 1`. They are exchanged by the
//! PT map and stay far from linear dependence at every energy. The Frobenius
//! pairs at a single point (`F(a, b; c; y)` with `y^{1-c} F(a-c+1, b-c+1; 2-c; y)`,
//! or the analogue at `y = 1`) become nearly parallel on the real axis once
//! `κ` grows, with a relative Wronskian of order `e^{-πκ}`; they are kept
//! only as fallbacks for the isolated energies where `u1` and `u2` coincide.
//!
//! Both `y` and `1 - y` keep a positive real part along the real `z` axis, so
//! every principal-branch power is smooth there.
//!
//! Matching imposes continuity of `ψ` and `ψ'/m` at `z = ±a0`; exterior plane
//! waves carry their phase relative to `z = 0`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{derive, mass_at, DerivedParams, Incidence, ModelError, ModelParams};
use crate::specfun::{gauss_2f1, gauss_2f1_derivative, HypergeometricArgs, SpecfunError};

/// Condition estimate above which matching is reported as ill-conditioned.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Minimum distance of an exponent difference from the integers for a
/// Frobenius pair to count as non-degenerate.
const BASIS_TOL: f64 = 1e-6;
/// Relative Wronskian below which the regular pair is abandoned.
const DEPENDENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("all hypergeometric bases are degenerate (c = {c}, c - a - b = {s})")]
    DegenerateBasis { c: Complex64, s: Complex64 },
    #[error("matching system at E = {energy} has condition estimate {condition:e}")]
    IllConditionedMatching { energy: f64, condition: f64 },
    #[error("position {z} lies outside the junctions |z| <= {a0}")]
    OutsideInterior { z: f64, a0: f64 },
}

/// Which pair of hypergeometric solutions spans the interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Solutions regular at `y = 0` and at `y = 1`.
    Regular,
    /// Frobenius pair at `y = 0`.
    Origin,
    /// Frobenius pair at `y = 1`.
    Unit,
}

/// Interior solutions and their `z`-derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorBasisValue {
    pub psi1: Complex64,
    pub dpsi1: Complex64,
    pub psi2: Complex64,
    pub dpsi2: Complex64,
}

/// The interior basis at a fixed energy.
#[derive(Debug, Clone, Copy)]
pub struct InteriorBasis {
    pub params: ModelParams,
    pub derived: DerivedParams,
    pub kind: BasisKind,
}

fn integer_distance(z: Complex64) -> f64 {
    Complex64::new(z.re - z.re.round(), z.im).norm()
}

impl InteriorBasis {
    pub fn new(params: &ModelParams, energy: f64) -> Result<Self, AnalyticError> {
        let derived = derive(params, energy)?;
        let DerivedParams { a, b, c, .. } = derived;
        let regular = Self { params: *params, derived, kind: BasisKind::Regular };
        if regular.relative_wronskian(0.0)? > DEPENDENCE_TOL {
            return Ok(regular);
        }
        let s = c - a - b;
        let (dc, ds) = (integer_distance(c), integer_distance(s));
        if dc.max(ds) < BASIS_TOL {
            return Err(AnalyticError::DegenerateBasis { c, s });
        }
        let kind = if dc >= ds { BasisKind::Origin } else { BasisKind::Unit };
        Ok(Self { kind, ..regular })
    }

    /// `|ψ1 ψ2' - ψ2 ψ1'| / (|ψ1 ψ2'| + |ψ2 ψ1'|)`: near zero when the pair is
    /// close to linearly dependent.
    pub fn relative_wronskian(&self, z: f64) -> Result<f64, AnalyticError> {
        let v = self.eval(z)?;
        let (x, y) = (v.psi1 * v.dpsi2, v.psi2 * v.dpsi1);
        Ok((x - y).norm() / (x.norm() + y.norm()))
    }

    pub fn eval(&self, z: f64) -> Result<InteriorBasisValue, AnalyticError> {
        let a0 = self.params.a0;
        if z.abs() > a0 * (1.0 + 1e-12) {
            return Err(AnalyticError::OutsideInterior { z, a0 });
        }
        let DerivedParams { p, q, a, b, c, .. } = self.derived;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let plus = one + i * z;
        let minus = one - i * z;
        let y = plus * 0.5;
        let g = self.params.beta.sqrt()
            * Complex64::new(2.0, 0.0).powc(-(p + q))
            * plus.powc(p - 0.25)
            * minus.powc(q - 0.25);
        let dlog_g = i * (p - 0.25) / plus - i * (q - 0.25) / minus;

        // (u, du/dy) for both solutions
        let [(u1, du1), (u2, du2)] = match self.kind {
            BasisKind::Regular => {
                let f1 = HypergeometricArgs::new(a, b, c, y);
                let f2 = HypergeometricArgs::new(a, b, a + b - c + 1.0, minus * 0.5);
                [(gauss_2f1(&f1)?, gauss_2f1_derivative(&f1)?), (gauss_2f1(&f2)?, -gauss_2f1_derivative(&f2)?)]
            }
            BasisKind::Origin => {
                let f1 = HypergeometricArgs::new(a, b, c, y);
                let f2 = HypergeometricArgs::new(a - c + 1.0, b - c + 1.0, 2.0 - c, y);
                let (v2, d2) = (gauss_2f1(&f2)?, gauss_2f1_derivative(&f2)?);
                let pow = y.powc(one - c);
                [(gauss_2f1(&f1)?, gauss_2f1_derivative(&f1)?), (pow * v2, pow * ((one - c) / y * v2 + d2))]
            }
            BasisKind::Unit => {
                let w = minus * 0.5;
                let s = c - a - b;
                let f1 = HypergeometricArgs::new(a, b, one - s, w);
                let f2 = HypergeometricArgs::new(c - a, c - b, s + 1.0, w);
                let (v2, d2) = (gauss_2f1(&f2)?, gauss_2f1_derivative(&f2)?);
                let pow = w.powc(s);
                [(gauss_2f1(&f1)?, -gauss_2f1_derivative(&f1)?), (pow * v2, -pow * (s / w * v2 + d2))]
            }
        };
        let dy = i * 0.5;
        Ok(InteriorBasisValue {
            psi1: g * u1,
            dpsi1: g * (dlog_g * u1 + dy * du1),
            psi2: g * u2,
            dpsi2: g * (dlog_g * u2 + dy * du2),
        })
    }
}

/// Interior basis at position `z` (inside the junctions) and energy `energy`.
pub fn interior_basis(z: f64, energy: f64, params: &ModelParams) -> Result<InteriorBasisValue, AnalyticError> {
    InteriorBasis::new(params, energy)?.eval(z)
}

/// Amplitudes of a scattering state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    pub incidence: Incidence,
    pub energy: f64,
    pub r: Complex64,
    pub t: Complex64,
    pub r2: f64,
    pub t2: f64,
    /// Interior coefficient of `ψ1`.
    pub p: Complex64,
    /// Interior coefficient of `ψ2`.
    pub q: Complex64,
    /// Condition estimate of the equilibrated matching system.
    pub condition: f64,
}

/// A solved scattering state that can be evaluated anywhere on the line.
#[derive(Debug, Clone, Copy)]
pub struct ScatteringState {
    pub basis: InteriorBasis,
    pub result: ScatteringResult,
}

impl ScatteringState {
    pub fn solve(params: &ModelParams, energy: f64, incidence: Incidence) -> Result<Self, AnalyticError> {
        let state = Self::solve_unchecked(params, energy, incidence)?;
        let condition = state.result.condition;
        if !(condition <= CONDITION_LIMIT) {
            return Err(AnalyticError::IllConditionedMatching { energy, condition });
        }
        Ok(state)
    }

    /// Like [`ScatteringState::solve`] but returns whatever the matching
    /// system yields; callers inspect `result.condition` themselves.
    pub fn solve_unchecked(params: &ModelParams, energy: f64, incidence: Incidence) -> Result<Self, AnalyticError> {
        let basis = InteriorBasis::new(params, energy)?;
        let a0 = params.a0;
        let k = basis.derived.k;
        let i = Complex64::i();
        let left = basis.eval(-a0)?;
        let right = basis.eval(a0)?;
        // e^{ik a0} and e^{-ik a0}
        let out = (i * k * a0).exp();
        let inc = (-i * k * a0).exp();
        let zero = Complex64::new(0.0, 0.0);

        // unknowns (P, Q, R, T); ψ' rows are continuous because m is
        let (m, rhs) = match incidence {
            Incidence::Left => (
                Matrix4::new(
                    left.psi1,
                    left.psi2,
                    -out,
                    zero,
                    left.dpsi1,
                    left.dpsi2,
                    i * k * out,
                    zero,
                    right.psi1,
                    right.psi2,
                    zero,
                    -out,
                    right.dpsi1,
                    right.dpsi2,
                    zero,
                    -i * k * out,
                ),
                Vector4::new(inc, i * k * inc, zero, zero),
            ),
            Incidence::Right => (
                Matrix4::new(
                    left.psi1,
                    left.psi2,
                    zero,
                    -out,
                    left.dpsi1,
                    left.dpsi2,
                    zero,
                    i * k * out,
                    right.psi1,
                    right.psi2,
                    -out,
                    zero,
                    right.dpsi1,
                    right.dpsi2,
                    -i * k * out,
                    zero,
                ),
                Vector4::new(zero, zero, inc, -i * k * inc),
            ),
        };
        let (x, condition) = solve_equilibrated(m, rhs);
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(AnalyticError::IllConditionedMatching { energy, condition });
        }
        let (r, t) = (x[2], x[3]);
        Ok(Self {
            basis,
            result: ScatteringResult {
                incidence,
                energy,
                r,
                t,
                r2: r.norm_sqr(),
                t2: t.norm_sqr(),
                p: x[0],
                q: x[1],
                condition,
            },
        })
    }

    /// `(ψ(z), ψ'(z))`.
    pub fn eval(&self, z: f64) -> Result<(Complex64, Complex64), AnalyticError> {
        let a0 = self.basis.params.a0;
        let k = self.basis.derived.k;
        let i = Complex64::i();
        let ScatteringResult { r, t, p, q, incidence, .. } = self.result;
        let fwd = (i * k * z).exp();
        let bwd = (-i * k * z).exp();
        let ik = i * k;
        Ok(match (incidence, z) {
            (_, z) if z.abs() <= a0 => {
                let b = self.basis.eval(z)?;
                (p * b.psi1 + q * b.psi2, p * b.dpsi1 + q * b.dpsi2)
            }
            (Incidence::Left, z) if z < 0.0 => (fwd + r * bwd, ik * (fwd - r * bwd)),
            (Incidence::Left, _) => (t * fwd, ik * t * fwd),
            (Incidence::Right, z) if z < 0.0 => (t * bwd, -ik * t * bwd),
            (Incidence::Right, _) => (bwd + r * fwd, ik * (r * fwd - bwd)),
        })
    }

    /// BenDaniel-Duke flux variable `ψ'/m`.
    pub fn mass_weighted_derivative(&self, z: f64) -> Result<Complex64, AnalyticError> {
        Ok(self.eval(z)?.1 / mass_at(z, &self.basis.params))
    }
}

/// Solves `m x = rhs` after row and column scaling, returning `x` and the
/// 1-norm condition number of the scaled matrix.
fn solve_equilibrated(m: Matrix4<Complex64>, rhs: Vector4<Complex64>) -> (Vector4<Complex64>, f64) {
    let mut scaled = m;
    let mut b = rhs;
    for r in 0..4 {
        let s = (0..4).map(|c| scaled[(r, c)].norm()).fold(0.0, f64::max);
        if s > 0.0 {
            for c in 0..4 {
                scaled[(r, c)] /= s;
            }
            b[r] /= s;
        }
    }
    let mut col_scale = [1.0; 4];
    for (c, cs) in col_scale.iter_mut().enumerate() {
        let s = (0..4).map(|r| scaled[(r, c)].norm()).fold(0.0, f64::max);
        if s > 0.0 {
            *cs = s;
            for r in 0..4 {
                scaled[(r, c)] /= s;
            }
        }
    }
    let lu = scaled.lu();
    let inv = match lu.try_inverse() {
        Some(inv) => inv,
        None => return (Vector4::from_element(Complex64::new(f64::NAN, f64::NAN)), f64::INFINITY),
    };
    let condition = norm1(&scaled) * norm1(&inv);
    let mut x = lu.solve(&b).unwrap_or_else(|| inv * b);
    for c in 0..4 {
        x[c] /= col_scale[c];
    }
    (x, condition)
}

fn norm1(m: &Matrix4<Complex64>) -> f64 {
    (0..4).map(|c| (0..4).map(|r| m[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Reflection and transmission amplitudes at `energy`.
pub fn match_and_scatter(
    energy: f64,
    params: &ModelParams,
    incidence: Incidence,
) -> Result<ScatteringResult, AnalyticError> {
    ScatteringState::solve(params, energy, incidence).map(|s| s.result)
}

/// `ψ` sampled on `z_grid`.
pub fn wavefunction_trace(
    energy: f64,
    params: &ModelParams,
    incidence: Incidence,
    z_grid: &[f64],
) -> Result<Vec<Complex64>, AnalyticError> {
    let state = ScatteringState::solve(params, energy, incidence)?;
    z_grid.iter().map(|&z| state.eval(z).map(|(psi, _)| psi)).collect()
}
