//! Global and junction relations between generalized charges and currents.

use num_complex::Complex64;
use serde::Serialize;

use super::currents::{transformed_current, transformed_pair};
use super::domains::{same_position, Domain, TransformSpec};
use super::stack::spinor_bilinear;
use crate::error::{GceError, Result};
use crate::grid::{Grid, Side};
use crate::linalg::CMatrix;
use crate::solvers::{SpinorSolution, Stationary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargeRelation {
    /// ∫ ψ̄_1 γ⁰ ψ_2 dx by composite Simpson quadrature.
    pub q: Complex64,
    /// i (J_12(x2) − J_12(x1)) / (E_1 − E_2).
    pub boundary_value: Complex64,
    pub discrepancy: f64,
}

/// Compares the generalized charge on `[x1, x2]` with the boundary flux of the pair
/// current, for two single-system states of the same potential at different energies.
pub fn charge_current_relation(
    sol1: &SpinorSolution,
    sol2: &SpinorSolution,
    x1: f64,
    x2: f64,
    n_intervals: usize,
) -> Result<ChargeRelation> {
    for (name, s) in [("sol1", sol1), ("sol2", sol2)] {
        if s.n_systems() != 1 {
            return Err(GceError::InvalidArgument(format!(
                "{name} must be a single-system solution"
            )));
        }
    }
    if sol1.convention() != sol2.convention() {
        return Err(GceError::MixedConventions);
    }
    if sol1.profile() != sol2.profile() {
        return Err(GceError::InvalidArgument(
            "both states must solve the same potential".into(),
        ));
    }
    let (e1, e2) = (sol1.energy(), sol2.energy());
    if (e1 - e2).abs() <= 1e-14 * (1.0 + e1.abs().max(e2.abs())) {
        return Err(GceError::DegenerateEnergies(e1));
    }
    if n_intervals < 2 || n_intervals % 2 != 0 {
        return Err(GceError::InvalidArgument(format!(
            "Simpson quadrature needs an even number of intervals, got {n_intervals}"
        )));
    }
    if !(x1.is_finite() && x2.is_finite()) {
        return Err(GceError::InvalidArgument("integration bounds must be finite".into()));
    }
    let current = sol1.convention().current_matrix();
    let density = |x: f64| -> Result<Complex64> {
        let u = sol1.system_value(0, x, Side::Right)?;
        let v = sol2.system_value(0, x, Side::Right)?;
        Ok(u[0].conj() * v[0] + u[1].conj() * v[1])
    };
    let flux = |x: f64| -> Result<Complex64> {
        let u = sol1.system_value(0, x, Side::Right)?;
        let v = sol2.system_value(0, x, Side::Right)?;
        Ok(spinor_bilinear(&u, &current, &v))
    };
    let h = (x2 - x1) / n_intervals as f64;
    let mut sum = density(x1)? + density(x2)?;
    for k in 1..n_intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += density(x1 + h * k as f64)? * w;
    }
    let q = sum * (h / 3.0);
    let boundary_value = Complex64::i() * (flux(x2)? - flux(x1)?) / (e1 - e2);
    Ok(ChargeRelation {
        q,
        boundary_value,
        discrepancy: (q - boundary_value).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRelation {
    pub x0: f64,
    /// Mean transformed current on the domain ending at `x0`.
    pub c_minus: Complex64,
    /// Mean transformed current on the domain starting at `x0`.
    pub c_plus: Complex64,
    /// Current just right of `x0` from the left limit of ψ_1 carried through the junction.
    pub predicted_c_plus: Complex64,
    pub deviation: f64,
    /// Relative constancy of the current on each of the two domains.
    pub constancy_minus: f64,
    pub constancy_plus: f64,
}

/// Relates the constant transformed currents on the two domains meeting at a delta
/// barrier of system 1 at `x0`.
///
/// `junction` maps `ψ_1(x0⁻)` to `ψ_1(x0⁺)`.
pub fn delta_domain_relation(
    sol1: &SpinorSolution,
    sol2: &SpinorSolution,
    junction: &CMatrix,
    spec: &TransformSpec,
    x0: f64,
    grid: &Grid,
    domains: &[Domain],
) -> Result<DeltaRelation> {
    if junction.nrows() != 2 || junction.ncols() != 2 {
        return Err(GceError::DimensionMismatch {
            expected: 2,
            found: junction.nrows(),
        });
    }
    let minus = domains
        .iter()
        .find(|d| same_position(d.x_hi, x0))
        .ok_or(GceError::DomainsNotAdjacent(x0))?;
    let plus = domains
        .iter()
        .find(|d| same_position(d.x_lo, x0))
        .ok_or(GceError::DomainsNotAdjacent(x0))?;
    let profile = transformed_current(sol1, sol2, spec, grid, &[minus.clone(), plus.clone()])?;
    let (sm, sp) = (&profile.domain_stats[0], &profile.domain_stats[1]);
    if sm.n_samples == 0 || sp.n_samples == 0 {
        return Err(GceError::InvalidGrid(format!(
            "grid has no samples inside one of the domains meeting at x = {x0}"
        )));
    }
    let current = sol1.convention().current_matrix();
    let (u_left, _) = transformed_pair(sol1, sol2, spec, x0, Side::Left)?;
    let (_, v_plus) = transformed_pair(sol1, sol2, spec, x0, Side::Right)?;
    let carried = [
        junction[(0, 0)] * u_left[0] + junction[(0, 1)] * u_left[1],
        junction[(1, 0)] * u_left[0] + junction[(1, 1)] * u_left[1],
    ];
    let predicted_c_plus = spinor_bilinear(&carried, &current, &v_plus);
    Ok(DeltaRelation {
        x0,
        c_minus: sm.mean,
        c_plus: sp.mean,
        predicted_c_plus,
        deviation: (sp.mean - predicted_c_plus).norm(),
        constancy_minus: sm.max_deviation,
        constancy_plus: sp.max_deviation,
    })
}
