use serde::{Deserialize, Serialize};

use crate::error::{GceError, Result};
use crate::linalg::{identity, max_abs, max_abs_diff, pauli, CMatrix, I};

/// How a potential enters the Dirac equation: times the identity (scalar, mass-like)
/// or times γ⁰ (vector, electrostatic-like).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    #[default]
    Scalar,
    Vector,
}

impl Coupling {
    pub fn as_str(&self) -> &'static str {
        match self {
            Coupling::Scalar => "scalar",
            Coupling::Vector => "vector",
        }
    }
}

/// 1-D gamma matrices plus potential coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct Convention {
    name: String,
    gamma0: CMatrix,
    gamma1: CMatrix,
    coupling: Coupling,
}

const CLIFFORD_TOL: f64 = 1e-14;

/// Names accepted by [`Convention::named`].
pub const CONVENTION_NAMES: [&str; 2] = ["default", "sigma-y"];

impl Convention {
    pub fn new(name: &str, gamma0: CMatrix, gamma1: CMatrix, coupling: Coupling) -> Result<Self> {
        let shape_ok = |m: &CMatrix| m.nrows() == 2 && m.ncols() == 2;
        if !shape_ok(&gamma0) || !shape_ok(&gamma1) {
            return Err(GceError::InvalidConvention("gamma matrices must be 2x2".into()));
        }
        if gamma1.determinant().norm() < 1e-12 {
            return Err(GceError::InvalidConvention("gamma1 is singular".into()));
        }
        let one = identity(2);
        let checks = [
            ("(gamma0)^2 = 1", max_abs_diff(&(&gamma0 * &gamma0), &one)),
            ("(gamma1)^2 = -1", max_abs_diff(&(&gamma1 * &gamma1), &(-&one))),
            (
                "{gamma0, gamma1} = 0",
                max_abs(&(&gamma0 * &gamma1 + &gamma1 * &gamma0)),
            ),
            ("gamma0 Hermitian", max_abs_diff(&gamma0, &gamma0.adjoint())),
            ("gamma1 anti-Hermitian", max_abs_diff(&gamma1, &(-gamma1.adjoint()))),
        ];
        for (rule, dev) in checks {
            if dev > CLIFFORD_TOL {
                return Err(GceError::InvalidConvention(format!(
                    "{rule} fails by {dev:e}"
                )));
            }
        }
        Ok(Self {
            name: name.to_string(),
            gamma0,
            gamma1,
            coupling,
        })
    }

    /// `default`: γ⁰ = σ_z, γ¹ = iσ_x. `sigma-y`: γ⁰ = σ_z, γ¹ = iσ_y.
    pub fn named(name: &str, coupling: Coupling) -> Result<Self> {
        let [sx, sy, sz] = pauli();
        match name {
            "default" => Self::new(name, sz, sx * I, coupling),
            "sigma-y" => Self::new(name, sz, sy * I, coupling),
            other => Err(GceError::InvalidConvention(format!(
                "unknown convention `{other}` (known: {})",
                CONVENTION_NAMES.join(", ")
            ))),
        }
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma0(&self) -> &CMatrix {
        &self.gamma0
    }

    pub fn gamma1(&self) -> &CMatrix {
        &self.gamma1
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// K in `V·K`: identity for scalar, γ⁰ for vector coupling.
    pub fn coupling_matrix(&self) -> CMatrix {
        match self.coupling {
            Coupling::Scalar => identity(2),
            Coupling::Vector => self.gamma0.clone(),
        }
    }

    /// `-i (γ¹)⁻¹`, the factor turning `(V K - E γ⁰)` into the x-generator.
    pub fn propagation_factor(&self) -> CMatrix {
        // (γ¹)⁻¹ = -γ¹ because (γ¹)² = -1.
        &self.gamma1 * I
    }

    /// γ⁰γ¹, so that ψ̄γ¹χ = ψ† (γ⁰γ¹) χ.
    pub fn current_matrix(&self) -> CMatrix {
        &self.gamma0 * &self.gamma1
    }

    /// γ⁰K, so that ψ̄Kχ = ψ† (γ⁰K) χ.
    pub fn source_matrix(&self) -> CMatrix {
        &self.gamma0 * self.coupling_matrix()
    }

    /// Spinor factor of the spatial inversion x ↦ -x.
    pub fn parity_matrix(&self) -> CMatrix {
        self.gamma0.clone()
    }
}

impl Default for Convention {
    fn default() -> Self {
        Self::named("default", Coupling::Scalar).expect("built-in convention is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_rows, ONE, ZERO};

    #[test]
    fn named_conventions_are_valid() {
        for name in CONVENTION_NAMES {
            let conv = Convention::named(name, Coupling::Vector).unwrap();
            assert_eq!(conv.coupling(), Coupling::Vector);
        }
        assert!(Convention::named("weyl", Coupling::Scalar).is_err());
    }

    #[test]
    fn literal_sigma_x_rejected() {
        // γ¹ = σ_x squares to +1 and is Hermitian, so it cannot be a spatial gamma matrix.
        let [sx, _, sz] = pauli();
        let err = Convention::new("literal", sz, sx, Coupling::Scalar).unwrap_err();
        assert!(matches!(err, GceError::InvalidConvention(_)));
    }

    #[test]
    fn singular_gamma1_rejected() {
        let [_, _, sz] = pauli();
        let g1 = from_rows(&[&[ONE, ZERO], &[ZERO, ZERO]]);
        let err = Convention::new("bad", sz, g1, Coupling::Scalar).unwrap_err();
        assert!(err.to_string().contains("singular"));
    }

    #[test]
    fn propagation_factor_is_minus_i_inverse_gamma1() {
        let conv = Convention::default();
        let g1_inv = conv.gamma1().clone().try_inverse().unwrap();
        let expected = g1_inv * c(0.0, -1.0);
        assert!(max_abs_diff(&conv.propagation_factor(), &expected) < 1e-15);
    }
}
