use num_complex::Complex64;

use super::piecewise::{initial_state, BoundarySpec, Mode, ModePair, Model, PiecewiseField, SampledField, ScatteringData};
use super::Stationary;
use crate::error::{GceError, Result};
use crate::grid::{Grid, Side};
use crate::linalg::{ensure_hermitian, identity, kron, CMatrix, CVector, I, ONE, ZERO};
use crate::profile::PotentialProfile;

fn raise() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

fn lower() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

/// Generator of `y' = M y` with `y = (φ_i, φ_i')` per system, for
/// `-φ''/2m + V φ = E φ` with constant `V`.
pub fn schrodinger_generator(v: &CMatrix, energy: f64, mass: f64) -> Result<CMatrix> {
    ensure_hermitian(v)?;
    check_mass(mass)?;
    Ok(SchrodingerModel { energy, mass }.generator(v))
}

/// Junction across `S δ(x - x0)`: φ continuous, φ' jumps by `2m S φ`.
pub fn schrodinger_junction(strength: &CMatrix, mass: f64) -> Result<CMatrix> {
    ensure_hermitian(strength)?;
    check_mass(mass)?;
    Ok(SchrodingerModel { energy: 0.0, mass }.junction(strength))
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(GceError::InvalidArgument(format!("mass must be positive, got {mass}")));
    }
    Ok(())
}

struct SchrodingerModel {
    energy: f64,
    mass: f64,
}

impl Model for SchrodingerModel {
    fn generator(&self, v: &CMatrix) -> CMatrix {
        let n = v.nrows();
        let shifted = (v - identity(n) * Complex64::from(self.energy)) * Complex64::from(2.0 * self.mass);
        kron(&identity(n), &raise()) + kron(&shifted, &lower())
    }

    fn junction(&self, strength: &CMatrix) -> CMatrix {
        let n = strength.nrows();
        identity(2 * n) + kron(&(strength * Complex64::from(2.0 * self.mass)), &lower())
    }

    fn modes(&self, v: f64) -> Result<ModePair> {
        let k2 = 2.0 * self.mass * (self.energy - v);
        if k2 <= 0.0 {
            return Err(GceError::Evanescent(format!(
                "energy {} does not exceed asymptotic potential {v}",
                self.energy
            )));
        }
        let k = k2.sqrt();
        let mode = |sign: f64| Mode {
            vector: [ONE, I * (sign * k)],
            exponent: I * (sign * k),
            flux: sign * k / self.mass,
        };
        Ok(ModePair {
            right: mode(1.0),
            left: mode(-1.0),
        })
    }
}

/// Exact stationary Schrödinger solution, stored as `(φ_i, φ_i')` per system.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution {
    energy: f64,
    mass: f64,
    profile: PotentialProfile,
    field: PiecewiseField,
    scattering: Option<ScatteringData>,
}

/// Solves the stationary Schrödinger equation for a piecewise-constant profile.
pub fn solve_schrodinger(
    profile: &PotentialProfile,
    energy: f64,
    boundary: &BoundarySpec,
    mass: f64,
) -> Result<WaveSolution> {
    check_mass(mass)?;
    if !energy.is_finite() {
        return Err(GceError::InvalidArgument(format!("energy {energy} is not finite")));
    }
    let model = SchrodingerModel { energy, mass };
    let (left, scattering) = initial_state(profile, &model, boundary)?;
    Ok(WaveSolution {
        energy,
        mass,
        profile: profile.clone(),
        field: PiecewiseField::build(profile, &model, left),
        scattering,
    })
}

impl WaveSolution {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn profile(&self) -> &PotentialProfile {
        &self.profile
    }

    pub fn n_systems(&self) -> usize {
        self.profile.n_systems()
    }

    pub fn scattering(&self) -> Option<&ScatteringData> {
        self.scattering.as_ref()
    }

    /// Interleaved `(φ_0, φ_0', φ_1, φ_1', ...)` at `x`.
    pub fn value(&self, x: f64, side: Side) -> Result<CVector> {
        self.field.value(x, side)
    }

    pub fn evaluate(&self, grid: &Grid) -> Result<SampledField> {
        self.field.sample(grid)
    }
}

impl Stationary for WaveSolution {
    fn n_systems(&self) -> usize {
        self.profile.n_systems()
    }

    fn energy(&self) -> f64 {
        self.energy
    }

    fn system_value(&self, system: usize, x: f64, side: Side) -> Result<[Complex64; 2]> {
        let n = self.n_systems();
        if system >= n {
            return Err(GceError::IndexOutOfRange { index: system, len: n });
        }
        let v = self.field.value(x, side)?;
        Ok([v[2 * system], v[2 * system + 1]])
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.field.breakpoints()
    }
}
