use num_complex::Complex64;

use super::convention::Convention;
use super::piecewise::{initial_state, BoundarySpec, Model, ModePair, PiecewiseField, SampledField, ScatteringData};
use super::Stationary;
use crate::error::{GceError, Result};
use crate::grid::{Grid, Side};
use crate::linalg::{bilinear, ensure_hermitian, expm, identity, kron, CMatrix, CVector};
use crate::profile::PotentialProfile;

/// Generator `M` of `ψ' = M ψ` for `(iγ¹∂ₓ + Eγ⁰ - V K) ψ = 0` with constant `V`.
///
/// The state stacks one spinor per system: component `2i + s` is spinor entry `s`
/// of system `i`.
pub fn dirac_generator(v: &CMatrix, energy: f64, convention: &Convention) -> Result<CMatrix> {
    ensure_hermitian(v)?;
    Ok(DiracModel { energy, convention }.generator(v))
}

/// Junction `ψ(x0⁺) = exp(S ⊗ (-i(γ¹)⁻¹ K)) ψ(x0⁻)` across a delta barrier `S δ(x - x0)`.
pub fn delta_junction(strength: &CMatrix, convention: &Convention) -> Result<CMatrix> {
    ensure_hermitian(strength)?;
    Ok(DiracModel {
        energy: 0.0,
        convention,
    }
    .junction(strength))
}

struct DiracModel<'a> {
    energy: f64,
    convention: &'a Convention,
}

impl Model for DiracModel<'_> {
    fn generator(&self, v: &CMatrix) -> CMatrix {
        let g = self.convention.propagation_factor();
        let gk = &g * self.convention.coupling_matrix();
        let ge = &g * self.convention.gamma0();
        kron(v, &gk) - kron(&identity(v.nrows()), &ge) * Complex64::from(self.energy)
    }

    fn junction(&self, strength: &CMatrix) -> CMatrix {
        let gk = self.convention.propagation_factor() * self.convention.coupling_matrix();
        expm(&kron(strength, &gk))
    }

    fn modes(&self, v: f64) -> Result<ModePair> {
        let single = CMatrix::from_element(1, 1, Complex64::from(v));
        let g = self.generator(&single);
        let current = self.convention.current_matrix();
        super::piecewise::classify_modes(&g, |u| bilinear(u, &current, u).re)
    }
}

/// Exact stationary Dirac solution on the whole real line.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorSolution {
    energy: f64,
    convention: Convention,
    profile: PotentialProfile,
    field: PiecewiseField,
    scattering: Option<ScatteringData>,
}

/// Solves the stationary Dirac equation for a piecewise-constant profile.
pub fn solve_dirac(
    profile: &PotentialProfile,
    energy: f64,
    boundary: &BoundarySpec,
    convention: &Convention,
) -> Result<SpinorSolution> {
    if !energy.is_finite() {
        return Err(GceError::InvalidArgument(format!("energy {energy} is not finite")));
    }
    let model = DiracModel { energy, convention };
    let (left, scattering) = initial_state(profile, &model, boundary)?;
    Ok(SpinorSolution {
        energy,
        convention: convention.clone(),
        profile: profile.clone(),
        field: PiecewiseField::build(profile, &model, left),
        scattering,
    })
}

impl SpinorSolution {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn convention(&self) -> &Convention {
        &self.convention
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

    /// Full stacked spinor at `x`; `side` selects the limit at a delta barrier.
    pub fn value(&self, x: f64, side: Side) -> Result<CVector> {
        self.field.value(x, side)
    }

    pub fn evaluate(&self, grid: &Grid) -> Result<SampledField> {
        self.field.sample(grid)
    }
}

impl Stationary for SpinorSolution {
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
