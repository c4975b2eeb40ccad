//! Collections of per-system stationary states and the bilinears built from them.

use num_complex::Complex64;

use crate::error::{GceError, Result};
use crate::grid::Side;
use crate::linalg::{CMatrix, I, ZERO};
use crate::profile::merge_positions;
use crate::solvers::{Convention, SpinorSolution, Stationary, WaveSolution};

/// The super-field Ψ = (ψ_1, …, ψ_N) assembled from stationary states.
///
/// Each member contributes one system: `(solution, component)` picks system
/// `component` of `solution`. Members may carry different energies.
#[derive(Debug, Clone)]
pub struct StateStack<S> {
    members: Vec<(S, usize)>,
}

pub type DiracStack = StateStack<SpinorSolution>;
pub type WaveStack = StateStack<WaveSolution>;

impl<S: Stationary + Clone> StateStack<S> {
    /// All systems of one jointly solved state.
    pub fn joint(solution: &S) -> Self {
        Self {
            members: (0..solution.n_systems()).map(|i| (solution.clone(), i)).collect(),
        }
    }

    /// One single-system solution per system.
    pub fn from_systems(solutions: &[S]) -> Result<Self> {
        if solutions.is_empty() {
            return Err(GceError::InvalidArgument("empty state stack".into()));
        }
        for (k, s) in solutions.iter().enumerate() {
            if s.n_systems() != 1 {
                return Err(GceError::InvalidArgument(format!(
                    "solution {k} describes {} systems, expected 1",
                    s.n_systems()
                )));
            }
        }
        Ok(Self {
            members: solutions.iter().map(|s| (s.clone(), 0)).collect(),
        })
    }

    pub fn from_members(members: Vec<(S, usize)>) -> Result<Self> {
        if members.is_empty() {
            return Err(GceError::InvalidArgument("empty state stack".into()));
        }
        for (s, i) in &members {
            if *i >= s.n_systems() {
                return Err(GceError::IndexOutOfRange {
                    index: *i,
                    len: s.n_systems(),
                });
            }
        }
        Ok(Self { members })
    }

    pub fn n_systems(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[(S, usize)] {
        &self.members
    }

    pub fn energies(&self) -> Vec<f64> {
        self.members.iter().map(|(s, _)| s.energy()).collect()
    }

    /// Two-component value of every system at `x`.
    pub fn values_at(&self, x: f64, side: Side) -> Result<Vec<[Complex64; 2]>> {
        self.members
            .iter()
            .map(|(s, i)| s.system_value(*i, x, side))
            .collect()
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        merge_positions(self.members.iter().flat_map(|(s, _)| s.breakpoints()))
    }
}

impl DiracStack {
    /// The convention shared by all members.
    pub fn convention(&self) -> Result<&Convention> {
        let first = self.members[0].0.convention();
        if self.members.iter().any(|(s, _)| s.convention() != first) {
            return Err(GceError::MixedConventions);
        }
        Ok(first)
    }
}

impl WaveStack {
    /// The mass shared by all members.
    pub fn mass(&self) -> Result<f64> {
        let first = self.members[0].0.mass();
        if self.members.iter().any(|(s, _)| s.mass() != first) {
            return Err(GceError::InvalidArgument("solutions use different masses".into()));
        }
        Ok(first)
    }
}

/// `u† b v` for two-component vectors.
pub(crate) fn spinor_bilinear(u: &[Complex64; 2], b: &CMatrix, v: &[Complex64; 2]) -> Complex64 {
    let bv0 = b[(0, 0)] * v[0] + b[(0, 1)] * v[1];
    let bv1 = b[(1, 0)] * v[0] + b[(1, 1)] * v[1];
    u[0].conj() * bv0 + u[1].conj() * bv1
}

/// How densities, currents and sources are formed from per-system values.
#[derive(Debug, Clone)]
pub(crate) enum Bilinears {
    /// Spinors; `current` = γ⁰γ¹, `source` = γ⁰K.
    Dirac { current: CMatrix, source: CMatrix },
    /// `(φ, φ')` pairs.
    Schrodinger { mass: f64 },
}

impl Bilinears {
    pub fn dirac(convention: &Convention) -> Self {
        Bilinears::Dirac {
            current: convention.current_matrix(),
            source: convention.source_matrix(),
        }
    }

    /// Pair density ψ̄_i γ⁰ ψ_j (Dirac) or φ_i* φ_j.
    pub fn pair_density(&self, u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
        match self {
            Bilinears::Dirac { .. } => u[0].conj() * v[0] + u[1].conj() * v[1],
            Bilinears::Schrodinger { .. } => u[0].conj() * v[0],
        }
    }

    /// Pair current ψ̄_i γ¹ ψ_j, or (i/2m)(φ_i'* φ_j − φ_i* φ_j').
    pub fn pair_current(&self, u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
        match self {
            Bilinears::Dirac { current, .. } => spinor_bilinear(u, current, v),
            Bilinears::Schrodinger { mass } => {
                I * (u[1].conj() * v[0] - u[0].conj() * v[1]) / (2.0 * mass)
            }
        }
    }

    /// Pair source bilinear ψ̄_i K ψ_j, or φ_i* φ_j.
    pub fn pair_source(&self, u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
        match self {
            Bilinears::Dirac { source, .. } => spinor_bilinear(u, source, v),
            Bilinears::Schrodinger { .. } => u[0].conj() * v[0],
        }
    }

    /// Σ_ij w_ij · pair(u_i, u_j), skipping zero weights.
    pub fn weighted(
        w: &CMatrix,
        values: &[[Complex64; 2]],
        pair: impl Fn(&[Complex64; 2], &[Complex64; 2]) -> Complex64,
    ) -> Complex64 {
        let mut acc = ZERO;
        for (i, ui) in values.iter().enumerate() {
            for (j, uj) in values.iter().enumerate() {
                let wij = w[(i, j)];
                if wij != ZERO {
                    acc += wij * pair(ui, uj);
                }
            }
        }
        acc
    }
}

/// Matrix unit E_ij (1 at row i, column j).
pub(crate) fn matrix_unit(n: usize, i: usize, j: usize) -> Result<CMatrix> {
    if i >= n || j >= n {
        return Err(GceError::PairOutOfRange(i, j, n));
    }
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    Ok(m)
}
