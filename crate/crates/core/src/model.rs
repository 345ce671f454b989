//! The physical model: mass and complex potential profiles of the diffused
//! double heterojunction, the coordinate map to constant mass, per-energy
//! derived parameters and a sampler producing layered profiles for the
//! transfer-matrix oracle.
//!
//! Units are ħ = 1. Inside `|z| < a0`
//!
//! ```text
//! m(z) = β² / (2(1 + z²)),    V(z) = (-μ1 + iμ2 z) / (1 + z²)
//! ```
//!
//! and both are frozen at their junction values outside. `Re V` and `m` are
//! continuous at `±a0`; `Im V` jumps to zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("energy {energy} is not above the exterior potential {threshold}")]
    SubThresholdEnergy { energy: f64, threshold: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Side from which the unit-amplitude wave arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Incidence {
    Left,
    Right,
}

impl Incidence {
    pub fn mirrored(self) -> Self {
        match self {
            Incidence::Left => Incidence::Right,
            Incidence::Right => Incidence::Left,
        }
    }
}

/// The four constants fixing both profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Well depth (`> 0`) or barrier height (`< 0`).
    pub mu1: f64,
    /// Gain/loss strength; gain sits at `z > 0`.
    pub mu2: f64,
    pub beta: f64,
    /// Junction half-width.
    pub a0: f64,
}

impl ModelParams {
    pub fn new(mu1: f64, mu2: f64, beta: f64, a0: f64) -> Result<Self, ModelError> {
        let p = Self { mu1, mu2, beta, a0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.check_geometry()?;
        if self.mu2 < 0.0 {
            return Err(invalid("mu2", format!("must be >= 0, got {}", self.mu2)));
        }
        Ok(())
    }

    /// Checks everything except the sign of `mu2`, so that mirrored models
    /// from [`ModelParams::reflected`] remain usable by the solvers.
    pub(crate) fn check_geometry(&self) -> Result<(), ModelError> {
        for (field, v) in [("mu1", self.mu1), ("mu2", self.mu2), ("beta", self.beta), ("a0", self.a0)] {
            if !v.is_finite() {
                return Err(invalid(field, format!("must be finite, got {v}")));
            }
        }
        if self.beta <= 0.0 {
            return Err(invalid("beta", format!("must be > 0, got {}", self.beta)));
        }
        if self.a0 <= 0.0 {
            return Err(invalid("a0", format!("must be > 0, got {}", self.a0)));
        }
        Ok(())
    }

    /// Mirror image `z -> -z`: the loss and gain sides swap, i.e. `mu2 -> -mu2`.
    ///
    /// The result deliberately violates the stored sign convention; it exists
    /// to express mirror identities between incidence directions.
    pub fn reflected(&self) -> Self {
        Self { mu2: -self.mu2, ..*self }
    }

    /// Exterior mass `m0 = m(±a0)`.
    pub fn exterior_mass(&self) -> f64 {
        self.beta * self.beta / (2.0 * (1.0 + self.a0 * self.a0))
    }

    /// Exterior potential `V0 = Re V(±a0)`.
    pub fn exterior_potential(&self) -> f64 {
        -self.mu1 / (1.0 + self.a0 * self.a0)
    }

    /// Exterior wavenumber at energy `e`; `None` when `e <= V0`.
    pub fn exterior_wavenumber(&self, e: f64) -> Option<f64> {
        let ke = 2.0 * self.exterior_mass() * (e - self.exterior_potential());
        (ke > 0.0).then(|| ke.sqrt())
    }
}

fn invalid(field: &'static str, reason: String) -> ModelError {
    ModelError::InvalidParams { field, reason }
}

pub fn mass_at(z: f64, params: &ModelParams) -> f64 {
    let zc = z.clamp(-params.a0, params.a0);
    params.beta * params.beta / (2.0 * (1.0 + zc * zc))
}

pub fn potential_at(z: f64, params: &ModelParams) -> Complex64 {
    if z.abs() < params.a0 {
        Complex64::new(-params.mu1, params.mu2 * z) / (1.0 + z * z)
    } else {
        Complex64::new(params.exterior_potential(), 0.0)
    }
}

/// Coordinate in which the kinetic term has constant mass, `dρ/dz = √(2m)`.
///
/// Inside this is `β asinh z`; outside it continues with the exterior slope,
/// keeping `ρ` odd, continuous and strictly increasing.
pub fn rho_of_z(z: f64, params: &ModelParams) -> f64 {
    if z.abs() <= params.a0 {
        params.beta * z.asinh()
    } else {
        let edge = params.beta * params.a0.asinh();
        let slope = (2.0 * params.exterior_mass()).sqrt();
        z.signum() * (edge + slope * (z.abs() - params.a0))
    }
}

/// Constant-mass potential in terms of `ρ̄ = ρ/β`:
/// `1/(4β²) - (V1/β²) sech²ρ̄ + i (V2/β²) sech ρ̄ tanh ρ̄`.
pub fn effective_potential(rho_bar: f64, params: &ModelParams) -> Complex64 {
    let b2 = params.beta * params.beta;
    let (v1, v2) = strengths(params);
    let sech = 1.0 / rho_bar.cosh();
    Complex64::new(0.25 / b2 - v1 / b2 * sech * sech, v2 / b2 * sech * rho_bar.tanh())
}

/// The same potential from the general recipe
/// `V + (7/32) m'²/m³ - m''/(8m²)` evaluated at `z` inside the junctions.
pub fn effective_potential_from_mass(z: f64, params: &ModelParams) -> Complex64 {
    let b2 = params.beta * params.beta;
    let s = 1.0 + z * z;
    let m = b2 / (2.0 * s);
    let dm = -b2 * z / (s * s);
    let ddm = b2 * (3.0 * z * z - 1.0) / (s * s * s);
    potential_at(z, params) + 7.0 / 32.0 * dm * dm / (m * m * m) - ddm / (8.0 * m * m)
}

fn strengths(params: &ModelParams) -> (f64, f64) {
    let b2 = params.beta * params.beta;
    (params.mu1 * b2 - 0.25, params.mu2 * b2)
}

/// Per-energy quantities of the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub energy: f64,
    /// Real strength `μ1 β² - 1/4` of the `sech²` term.
    pub v1: f64,
    /// Imaginary strength `μ2 β²` of the `sech tanh` term.
    pub v2: f64,
    pub m0: f64,
    pub v0: f64,
    /// `√(Eβ² - 1/4)`, imaginary below `E = 1/(4β²)`.
    pub kappa: Complex64,
    pub k: f64,
    pub p: Complex64,
    pub q: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

pub fn derive(params: &ModelParams, energy: f64) -> Result<DerivedParams, ModelError> {
    params.check_geometry()?;
    let v0 = params.exterior_potential();
    let k = match params.exterior_wavenumber(energy) {
        Some(k) if energy.is_finite() => k,
        _ => return Err(ModelError::SubThresholdEnergy { energy, threshold: v0 }),
    };
    let (v1, v2) = strengths(params);
    let b2 = params.beta * params.beta;
    let kappa = Complex64::new(energy * b2 - 0.25, 0.0).sqrt();
    let p = Complex64::new(0.25 + v1 + v2, 0.0).sqrt() * 0.5 + 0.25;
    let q = Complex64::new(0.25 + v1 - v2, 0.0).sqrt() * 0.5 + 0.25;
    let i = Complex64::i();
    Ok(DerivedParams {
        energy,
        v1,
        v2,
        m0: params.exterior_mass(),
        v0,
        kappa,
        k,
        p,
        q,
        a: p + q - i * kappa,
        b: p + q + i * kappa,
        c: p * 2.0 + 0.5,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PtPhase {
    Exact,
    /// `boundary` marks parameters sitting on the threshold itself.
    Broken {
        boundary: bool,
    },
}

/// Reality condition `|μ2| < μ1 + 1/(2β²)`. A Hermitian profile (`μ2 = 0`)
/// is always in the exact phase.
pub fn pt_phase_classify(params: &ModelParams) -> PtPhase {
    if params.mu2 == 0.0 {
        return PtPhase::Exact;
    }
    let bound = params.mu1 + 0.5 / (params.beta * params.beta);
    let lhs = params.mu2.abs();
    if (lhs - bound).abs() <= 1e-12 * bound.abs().max(1.0) {
        PtPhase::Broken { boundary: true }
    } else if lhs < bound {
        PtPhase::Exact
    } else {
        PtPhase::Broken { boundary: false }
    }
}

/// Piecewise-constant layering of a profile.
///
/// Slice `j` spans `edges[j]..edges[j + 1]` and carries the midpoint values
/// `z[j]`, `m[j]`, `v[j]`. The first and last slices are exterior padding, and
/// the half-spaces beyond `edges[0]` and `edges[len]` continue those media.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    pub edges: Vec<f64>,
    pub z: Vec<f64>,
    pub m: Vec<f64>,
    pub v: Vec<Complex64>,
}

impl ProfileGrid {
    /// Builds a grid from explicit slices, checking the layering invariants.
    pub fn from_slices(edges: Vec<f64>, m: Vec<f64>, v: Vec<Complex64>) -> Result<Self, ModelError> {
        if edges.len() < 2 || m.len() + 1 != edges.len() || v.len() != m.len() {
            return Err(ModelError::InvalidGrid("need len(edges) = len(m) + 1 = len(v) + 1".into()));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ModelError::InvalidGrid("edges must be strictly increasing".into()));
        }
        if m.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(ModelError::InvalidGrid("masses must be positive".into()));
        }
        if v.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(ModelError::InvalidGrid("potential must be finite".into()));
        }
        let z = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Ok(Self { edges, z, m, v })
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Mirror image: `z -> -z` with slice order reversed.
    pub fn mirrored(&self) -> Self {
        Self {
            edges: self.edges.iter().rev().map(|e| -e).collect(),
            z: self.z.iter().rev().map(|e| -e).collect(),
            m: self.m.iter().rev().copied().collect(),
            v: self.v.iter().rev().copied().collect(),
        }
    }
}

/// Slices `[-a0, a0]` into `n` equal layers with one padding layer of width
/// `padding` on each side.
pub fn sample_profile(params: &ModelParams, n: usize, padding: f64) -> Result<ProfileGrid, ModelError> {
    params.check_geometry()?;
    if n < 100 {
        return Err(ModelError::InvalidGrid(format!("need at least 100 slices, got {n}")));
    }
    if !(padding > 0.0 && padding.is_finite()) {
        return Err(ModelError::InvalidGrid(format!("padding must be positive, got {padding}")));
    }
    let a0 = params.a0;
    let h = 2.0 * a0 / n as f64;
    let mut edges = Vec::with_capacity(n + 3);
    edges.push(-a0 - padding);
    // built from both ends so that the grid mirrors onto itself bit for bit
    edges.extend((0..=n).map(|j| match (2 * j).cmp(&n) {
        std::cmp::Ordering::Less => -a0 + j as f64 * h,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => a0 - (n - j) as f64 * h,
    }));
    edges.push(a0 + padding);

    let m0 = params.exterior_mass();
    let v0 = Complex64::new(params.exterior_potential(), 0.0);
    let mut m = Vec::with_capacity(n + 2);
    let mut v = Vec::with_capacity(n + 2);
    m.push(m0);
    v.push(v0);
    for j in 0..n {
        // symmetric midpoints keep the PT pairing exact in floating point
        let z = -a0 + (j as f64 + 0.5) * h;
        let zs = match (2 * j + 1).cmp(&n) {
            std::cmp::Ordering::Less => z,
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => -(-a0 + ((n - 1 - j) as f64 + 0.5) * h),
        };
        m.push(mass_at(zs, params));
        v.push(potential_at(zs, params));
    }
    m.push(m0);
    v.push(v0);
    ProfileGrid::from_slices(edges, m, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ModelParams {
        ModelParams::new(3.0, 3.0, 4.0, 4.0).unwrap()
    }

    #[test]
    fn profile_values() {
        let p = fig1();
        assert_eq!(mass_at(0.0, &p), 8.0);
        assert!((mass_at(5.0, &p) - 8.0 / 17.0).abs() < 1e-15);
        assert_eq!(potential_at(0.0, &p), Complex64::new(-3.0, 0.0));
        let inside = potential_at(4.0 - 1e-12, &p);
        assert!((inside - Complex64::new(-3.0 / 17.0, 12.0 / 17.0)).norm() < 1e-11);
        assert_eq!(potential_at(4.0, &p), Complex64::new(-3.0 / 17.0, 0.0));
    }

    #[test]
    fn rho_map() {
        let p = fig1();
        assert_eq!(rho_of_z(0.0, &p), 0.0);
        assert!((rho_of_z(4.0, &p) - 4.0 * 4f64.asinh()).abs() < 1e-12);
        for z in [0.3, 3.9, 4.0, 4.1, 9.0] {
            assert_eq!(rho_of_z(-z, &p), -rho_of_z(z, &p));
        }
        assert!((rho_of_z(4.0 + 1e-9, &p) - rho_of_z(4.0, &p)).abs() < 1e-8);
    }

    #[test]
    fn derived_values() {
        let d = derive(&fig1(), 1.0).unwrap();
        assert_eq!(d.v1, 47.75);
        assert_eq!(d.v2, 48.0);
        assert!((d.p.re - (0.25 + 0.5 * 96f64.sqrt())).abs() < 1e-14);
        assert!((d.q - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        assert_eq!(d.a + d.b, (d.p + d.q) * 2.0);
        assert_eq!(d.c, d.p * 2.0 + 0.5);
        let at_threshold = derive(&fig1(), 1.0 / 64.0).unwrap();
        assert_eq!(at_threshold.kappa.norm(), 0.0);
    }

    #[test]
    fn sub_threshold_rejected() {
        let p = fig1();
        let v0 = p.exterior_potential();
        assert!(matches!(derive(&p, v0), Err(ModelError::SubThresholdEnergy { .. })));
        assert!(derive(&p, v0 + 1e-6).is_ok());
    }

    #[test]
    fn phase_classification() {
        assert_eq!(pt_phase_classify(&fig1()), PtPhase::Exact);
        let broken = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(pt_phase_classify(&broken), PtPhase::Broken { boundary: false });
        let edge = ModelParams::new(0.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(pt_phase_classify(&edge), PtPhase::Broken { boundary: true });
        let hermitian = ModelParams::new(-5.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(pt_phase_classify(&hermitian), PtPhase::Exact);
    }

    #[test]
    fn invalid_params() {
        assert!(ModelParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, -1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn grid_shape() {
        let p = fig1();
        let g = sample_profile(&p, 400, 2.0).unwrap();
        assert_eq!(g.len(), 402);
        assert_eq!(g.edges.len(), 403);
        assert_eq!((g.m[0], g.v[0]), (p.exterior_mass(), Complex64::new(p.exterior_potential(), 0.0)));
        assert_eq!(g.m[401], g.m[0]);
        for j in 0..g.len() {
            let k = g.len() - 1 - j;
            assert_eq!(g.v[j], g.v[k].conj());
            assert_eq!(g.m[j], g.m[k]);
        }
        assert!(sample_profile(&p, 99, 2.0).is_err());
        assert!(sample_profile(&p, 100, 0.0).is_err());
    }
}
