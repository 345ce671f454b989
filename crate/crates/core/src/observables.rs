//! Observables built on the two solvers: energy sweeps, spectral-singularity
//! scans, and current diagnostics.
//!
//! # PT-current
//!
//! Write the stationary equation as `-(ψ'/m)'/2 + Vψ = Eψ` with `m` even and
//! `V(-z) = V(z)*`. For real `E`, both `ψ*(z)` and `ψ(-z)` solve the equation
//! with potential `V(-z)`, so their mass-weighted Wronskian
//!
//! ```text
//! W = [ψ*(z) d/dz ψ(-z) - ψ*'(z) ψ(-z)] / m(z)
//!   = -[ψ*(z) ψ'(-z) + ψ*'(z) ψ(-z)] / m(z)
//! ```
//!
//! has `W' = 0`: expanding, `(ψ*φ'/m - ψ*'φ/m)' = ψ*(φ'/m)' - (ψ*'/m)'φ`, and
//! both second-derivative terms equal `2(V(-z) - E)` times the same product.
//! Since `ψ` and `ψ'/m` are continuous at the junctions, `W` is constant on the
//! whole line. The current reported here is
//!
//! ```text
//! J(z) = i/(2m(z)) · [ψ*'(z) ψ(-z) + ψ*(z) ψ'(-z)] = -(i/2) W,
//! ```
//!
//! i.e. `η = P` applied to `ψ` before differentiating. Applying `η` to `ψ'`
//! instead flips the sign of the second term; that bilinear is not a
//! Wronskian and is not constant even for a free plane wave, where it gives
//! `(k/m) e^{-2ikz}`.
//!
//! For left incidence the exterior value is `J = -k T R*/m0`, which equals
//! `k T* R/m0` because `T* R` is purely imaginary for PT-symmetric profiles.
//!
//! The ordinary flux `Im(ψ* ψ')/m` is the same construction without the parity
//! map. It is constant only for a real potential.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{AnalyticError, ScatteringState, CONDITION_LIMIT};
use crate::model::{mass_at, pt_phase_classify, Incidence, ModelError, ModelParams, PtPhase};
use crate::numeric::{richardson_check, NumericError};

/// Richardson error above which an oracle row is flagged.
pub const ORACLE_FLAG_TOL: f64 = 1e-5;
/// Default `|T|²` a scan must reach to count as a spectral singularity.
pub const DEFAULT_PEAK_THRESHOLD: f64 = 100.0;
const SCAN_POINTS: usize = 400;
const REFINEMENT_TOL: f64 = 1e-8;
/// Below this `|J_mean|` the spread is reported in absolute terms.
const SPREAD_ABS_BELOW: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservablesError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("invalid energy window [{e_min}, {e_max}] with {n_points} points: {reason}")]
    InvalidWindow { e_min: f64, e_max: f64, n_points: usize, reason: String },
    #[error("parameters are outside the singular regime: {0}")]
    NotSingularRegime(String),
    #[error("largest |T|^2 = {:.6e} at E = {:.6} is below the threshold {threshold}", .report.peak_t2, .report.e_located)]
    NoPeakFound { report: Box<SingularityReport>, threshold: f64 },
    #[error("PT symmetry is broken for these parameters")]
    BrokenPhase,
    #[error("grid point z = {0} has no mirror point")]
    AsymmetricGrid(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Analytic,
    Oracle,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Analytic => "analytic",
            Solver::Oracle => "oracle",
        }
    }
}

/// One energy of a sweep, with both incidence directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub energy: f64,
    /// `|T|²` for left incidence.
    pub t2: f64,
    /// `|T|²` for right incidence.
    pub t2_right: f64,
    pub r2_left: f64,
    pub r2_right: f64,
    /// `|R_L|² + |T|² - 1`.
    pub flux_deficit: f64,
    pub solver: Solver,
    /// Ill-conditioned matching (analytic) or unconverged slicing (oracle).
    pub condition_flag: bool,
    /// Set when the row could not be computed; all values are then NaN.
    pub failure: Option<String>,
}

impl SweepRow {
    fn failed(energy: f64, solver: Solver, reason: String) -> Self {
        Self {
            energy,
            t2: f64::NAN,
            t2_right: f64::NAN,
            r2_left: f64::NAN,
            r2_right: f64::NAN,
            flux_deficit: f64::NAN,
            solver,
            condition_flag: true,
            failure: Some(reason),
        }
    }
}

/// Uniform grid of `n_points` energies from `e_min` to `e_max` inclusive.
pub fn energy_grid(e_min: f64, e_max: f64, n_points: usize) -> Vec<f64> {
    let step = (e_max - e_min) / (n_points - 1) as f64;
    (0..n_points).map(|j| if j + 1 == n_points { e_max } else { e_min + j as f64 * step }).collect()
}

fn check_window(params: &ModelParams, e_min: f64, e_max: f64, n_points: usize) -> Result<(), ObservablesError> {
    let fail = |reason: String| ObservablesError::InvalidWindow { e_min, e_max, n_points, reason };
    if n_points < 2 {
        return Err(fail("need at least two points".into()));
    }
    if !(e_min.is_finite() && e_max.is_finite() && e_max > e_min) {
        return Err(fail("need finite e_min < e_max".into()));
    }
    let v0 = params.exterior_potential();
    if e_min <= v0 {
        return Err(fail(format!("e_min must exceed the exterior potential {v0}")));
    }
    Ok(())
}

fn sweep_point(params: &ModelParams, energy: f64, solver: Solver, slices: usize) -> SweepRow {
    let row = |l_t2: f64, l_r2: f64, r_t2: f64, r_r2: f64, flag: bool| SweepRow {
        energy,
        t2: l_t2,
        t2_right: r_t2,
        r2_left: l_r2,
        r2_right: r_r2,
        flux_deficit: l_r2 + l_t2 - 1.0,
        solver,
        condition_flag: flag,
        failure: None,
    };
    match solver {
        Solver::Analytic => {
            let solve = |inc| ScatteringState::solve_unchecked(params, energy, inc).map(|s| s.result);
            match (solve(Incidence::Left), solve(Incidence::Right)) {
                (Ok(l), Ok(r)) => {
                    let flag = l.condition.max(r.condition) > CONDITION_LIMIT;
                    row(l.t2, l.r2, r.t2, r.r2, flag)
                }
                (Err(e), _) | (_, Err(e)) => SweepRow::failed(energy, solver, e.to_string()),
            }
        }
        Solver::Oracle => {
            let solve = |inc| richardson_check(params, energy, inc, slices);
            match (solve(Incidence::Left), solve(Incidence::Right)) {
                (Ok(l), Ok(r)) => {
                    let flag = l.richardson_error.max(r.richardson_error) > ORACLE_FLAG_TOL;
                    row(l.t2, l.r2, r.t2, r.r2, flag)
                }
                (Err(e), _) | (_, Err(e)) => SweepRow::failed(energy, solver, e.to_string()),
            }
        }
    }
}

/// `|T|²` and `|R|²` for both incidences on a uniform energy grid.
///
/// Rows are computed in parallel but returned in energy order. A row that
/// fails is marked rather than aborting the sweep. `slices` is the coarse
/// oracle resolution; the reported oracle values come from `2 * slices`.
pub fn sweep(
    params: &ModelParams,
    e_min: f64,
    e_max: f64,
    n_points: usize,
    solver: Solver,
    slices: usize,
) -> Result<Vec<SweepRow>, ObservablesError> {
    params.check_geometry()?;
    check_window(params, e_min, e_max, n_points)?;
    Ok(energy_grid(e_min, e_max, n_points).into_par_iter().map(|e| sweep_point(params, e, solver, slices)).collect())
}

/// Result of a spectral-singularity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub e_located: f64,
    pub peak_t2: f64,
    /// Left-incidence `|R|²` at the peak.
    pub peak_r2_left: f64,
    pub peak_r2_right: f64,
    /// `(μ2 - μ1)β²/4 - 1/8`.
    pub e_eq32: f64,
    /// `(κ_s² + 1/4)/β²` with `κ_s = ((μ2 - μ1)β² - 1/2)/2`.
    pub e_squared_variant: f64,
    /// Singularity of the untruncated constant-mass potential,
    /// `(μ2 - μ1)/4 + 1/(4β²)`.
    pub e_untruncated: f64,
    pub window: (f64, f64),
    pub refinement_tol: f64,
    #[serde(skip)]
    pub scan: Vec<ScanPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub energy: f64,
    pub t2: f64,
    pub r2_left: f64,
    pub r2_right: f64,
}

fn scan_point(params: &ModelParams, energy: f64) -> Result<ScanPoint, ObservablesError> {
    let l = ScatteringState::solve_unchecked(params, energy, Incidence::Left)?.result;
    let r = ScatteringState::solve_unchecked(params, energy, Incidence::Right)?.result;
    Ok(ScanPoint { energy, t2: l.t2, r2_left: l.r2, r2_right: r.r2 })
}

/// Closed-form candidates `(e_eq32, e_squared_variant, e_untruncated)`.
pub fn singularity_candidates(params: &ModelParams) -> (f64, f64, f64) {
    let b2 = params.beta * params.beta;
    let gap = params.mu2 - params.mu1;
    let e_eq32 = gap * b2 / 4.0 - 0.125;
    let kappa = (gap * b2 - 0.5) / 2.0;
    let e_squared = (kappa * kappa + 0.25) / b2;
    let e_untruncated = gap / 4.0 + 0.25 / b2;
    (e_eq32, e_squared, e_untruncated)
}

/// Scans `|T|²` over `window`, brackets the largest sample and refines it by
/// golden-section search on `1/|T|²`.
pub fn locate_spectral_singularity(
    params: &ModelParams,
    window: (f64, f64),
    peak_threshold: f64,
) -> Result<SingularityReport, ObservablesError> {
    locate_with_tol(params, window, peak_threshold, REFINEMENT_TOL)
}

pub fn locate_with_tol(
    params: &ModelParams,
    window: (f64, f64),
    peak_threshold: f64,
    tol: f64,
) -> Result<SingularityReport, ObservablesError> {
    params.check_geometry()?;
    if params.mu1 >= 0.0 {
        return Err(ObservablesError::NotSingularRegime(format!("need a barrier (mu1 < 0), got mu1 = {}", params.mu1)));
    }
    let bound = params.mu1 + 0.5 / (params.beta * params.beta);
    if params.mu2 <= bound {
        return Err(ObservablesError::NotSingularRegime(format!("need mu2 > mu1 + 1/(2 beta^2) = {bound}")));
    }
    check_window(params, window.0, window.1, SCAN_POINTS)?;

    let scan: Vec<ScanPoint> = energy_grid(window.0, window.1, SCAN_POINTS)
        .into_par_iter()
        .map(|e| scan_point(params, e))
        .collect::<Result<_, _>>()?;
    let best = (0..scan.len()).max_by(|&i, &j| scan[i].t2.total_cmp(&scan[j].t2)).unwrap_or(0);
    let lo = scan[best.saturating_sub(1)].energy;
    let hi = scan[(best + 1).min(scan.len() - 1)].energy;
    let objective = |e: f64| scan_point(params, e).map(|p| 1.0 / p.t2);
    let e_refined = golden_section(objective, lo, hi, tol)?;
    let peak =
        if scan_point(params, e_refined)?.t2 >= scan[best].t2 { scan_point(params, e_refined)? } else { scan[best] };

    let (e_eq32, e_squared_variant, e_untruncated) = singularity_candidates(params);
    let report = SingularityReport {
        e_located: peak.energy,
        peak_t2: peak.t2,
        peak_r2_left: peak.r2_left,
        peak_r2_right: peak.r2_right,
        e_eq32,
        e_squared_variant,
        e_untruncated,
        window,
        refinement_tol: tol,
        scan,
    };
    if !(report.peak_t2 >= peak_threshold) {
        return Err(ObservablesError::NoPeakFound { report: Box::new(report), threshold: peak_threshold });
    }
    Ok(report)
}

fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64, ObservablesError>
where
    F: Fn(f64) -> Result<f64, ObservablesError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Samples of a current with their relative spread.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentTrace {
    pub z: Vec<f64>,
    pub j: Vec<Complex64>,
    /// `max |J - mean| / |mean|`, or absolute when `|mean| < 1e-12`.
    pub spread: f64,
}

fn spread_of(values: &[Complex64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    if mean.norm() < SPREAD_ABS_BELOW {
        dev
    } else {
        dev / mean.norm()
    }
}

/// PT-current `J(z)` of the scattering state; `z_grid` must contain `-z`
/// for every `z`.
pub fn pt_current_trace(
    energy: f64,
    params: &ModelParams,
    incidence: Incidence,
    z_grid: &[f64],
) -> Result<CurrentTrace, ObservablesError> {
    if pt_phase_classify(params) != PtPhase::Exact {
        return Err(ObservablesError::BrokenPhase);
    }
    check_mirrored(z_grid)?;
    let state = ScatteringState::solve(params, energy, incidence)?;
    pt_current(|z| state.eval(z), |z| mass_at(z, params), z_grid).map_err(Into::into)
}

/// PT-current of any wavefunction given as `z -> (ψ(z), ψ'(z))`.
pub fn pt_current<F, M, E>(wave: F, mass: M, z_grid: &[f64]) -> Result<CurrentTrace, E>
where
    F: Fn(f64) -> Result<(Complex64, Complex64), E>,
    M: Fn(f64) -> f64,
{
    let j = z_grid
        .iter()
        .map(|&z| {
            let (psi, dpsi) = wave(z)?;
            let (psi_m, dpsi_m) = wave(-z)?;
            Ok(Complex64::i() / (2.0 * mass(z)) * (dpsi.conj() * psi_m + psi.conj() * dpsi_m))
        })
        .collect::<Result<Vec<_>, E>>()?;
    Ok(CurrentTrace { spread: spread_of(&j), z: z_grid.to_vec(), j })
}

fn check_mirrored(z_grid: &[f64]) -> Result<(), ObservablesError> {
    let scale = z_grid.iter().fold(1.0f64, |s, z| s.max(z.abs()));
    let mut sorted = z_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &z in z_grid {
        let idx = sorted.partition_point(|&x| x < -z - 1e-12 * scale);
        if !sorted.get(idx).is_some_and(|&x| (x + z).abs() <= 1e-12 * scale) {
            return Err(ObservablesError::AsymmetricGrid(z));
        }
    }
    Ok(())
}

/// BenDaniel-Duke probability current `Im(ψ* ψ')/m`, as a real-valued trace
/// stored in the real parts of `j`.
pub fn flux_trace(
    energy: f64,
    params: &ModelParams,
    incidence: Incidence,
    z_grid: &[f64],
) -> Result<CurrentTrace, ObservablesError> {
    let state = ScatteringState::solve(params, energy, incidence)?;
    let j = z_grid
        .iter()
        .map(|&z| {
            let (psi, dpsi) = state.eval(z)?;
            Ok(Complex64::new((psi.conj() * dpsi).im / mass_at(z, params), 0.0))
        })
        .collect::<Result<Vec<_>, AnalyticError>>()?;
    Ok(CurrentTrace { spread: spread_of(&j), z: z_grid.to_vec(), j })
}

/// `n` points symmetric about zero spanning `[-half_width, half_width]`.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|j| {
            let mirror = n - 1 - j;
            let x = half_width * (2.0 * j.min(mirror) as f64 / (n - 1) as f64 - 1.0);
            if j <= mirror {
                x
            } else {
                -x
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidates_for_barrier_set() {
        let params = ModelParams::new(-1.0, 2.0, 1.0, 4.0).unwrap();
        let (e32, esq, eun) = singularity_candidates(&params);
        assert!((e32 - 0.625).abs() < 1e-15);
        assert!((esq - 1.8125).abs() < 1e-15);
        assert!((eun - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_minimum() {
        let x = golden_section(|x| Ok((x - 0.3) * (x - 0.3)), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn symmetric_grid_is_mirrored() {
        for n in [2, 7, 800] {
            let g = symmetric_grid(6.0, n);
            assert_eq!(g.len(), n);
            for j in 0..n {
                assert_eq!(g[j], -g[n - 1 - j]);
            }
            assert_eq!(g[0], -6.0);
            check_mirrored(&g).unwrap();
        }
        assert!(check_mirrored(&[-1.0, 0.5, 1.0]).is_err());
    }

    #[test]
    fn spread_uses_absolute_scale_near_zero() {
        assert_eq!(spread_of(&[Complex64::new(1e-14, 0.0), Complex64::new(-1e-14, 0.0)]), 1e-14);
        assert!((spread_of(&[Complex64::new(1.0, 0.0), Complex64::new(1.1, 0.0)]) - 0.05 / 1.05).abs() < 1e-15);
    }
}
