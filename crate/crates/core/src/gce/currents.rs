//! Generalized densities and currents sampled on grids.

use num_complex::Complex64;
use serde::Serialize;

use super::domains::{Domain, TransformSpec};
use super::stack::{Bilinears, DiracStack, WaveStack};
use crate::algebra::SunBasis;
use crate::error::{GceError, Result};
use crate::grid::{Grid, Side};
use crate::linalg::{identity, CMatrix};
use crate::solvers::{SpinorSolution, Stationary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurrentKind {
    Dirac,
    Schrodinger,
}

/// What a current profile measures (zero-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurrentIndex {
    Generator(usize),
    Pair(usize, usize),
    /// Identity-weighted current summed over all systems.
    Total,
    /// `ψ̄_1(x) γ¹ P ψ_2(F(x))` for a symmetry transform F.
    Transformed,
}

/// Constancy of a current's spatial part inside one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainStat {
    pub domain: Domain,
    pub n_samples: usize,
    pub mean: Complex64,
    /// Max |j1 − mean| over samples strictly inside, relative to max(|mean|, 1e-30).
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentProfile {
    pub kind: CurrentKind,
    pub index: CurrentIndex,
    pub grid: Vec<f64>,
    pub j1: Vec<Complex64>,
    pub j0: Vec<Complex64>,
    pub domain_stats: Vec<DomainStat>,
}

/// Max deviation from the mean, normalized by max(|mean|, 1e-30). `None` when empty.
pub fn relative_variation(values: &[Complex64]) -> Option<(Complex64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    Some((mean, dev / mean.norm().max(1e-30)))
}

impl CurrentProfile {
    /// Recomputes `domain_stats` for the given domains.
    pub fn with_domains(mut self, domains: &[Domain]) -> Self {
        self.domain_stats = domains.iter().map(|d| self.stat(d)).collect();
        self
    }

    pub fn stat(&self, domain: &Domain) -> DomainStat {
        let inside: Vec<Complex64> = self
            .grid
            .iter()
            .zip(&self.j1)
            .filter(|(x, _)| domain.contains(**x))
            .map(|(_, j)| *j)
            .collect();
        let (mean, max_deviation) = relative_variation(&inside).unwrap_or((Complex64::new(0.0, 0.0), 0.0));
        DomainStat {
            domain: domain.clone(),
            n_samples: inside.len(),
            mean,
            max_deviation,
        }
    }

    /// Spatial-current samples lying outside every given domain.
    pub fn outside(&self, domains: &[Domain]) -> Vec<Complex64> {
        self.grid
            .iter()
            .zip(&self.j1)
            .filter(|(x, _)| !domains.iter().any(|d| d.x_lo <= **x && **x <= d.x_hi))
            .map(|(_, j)| *j)
            .collect()
    }
}

fn sample_weighted(
    values_at: impl Fn(f64) -> Result<Vec<[Complex64; 2]>>,
    bil: &Bilinears,
    w: &CMatrix,
    grid: &Grid,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut j1 = Vec::with_capacity(grid.len());
    let mut j0 = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let u = values_at(x)?;
        j1.push(Bilinears::weighted(w, &u, |a, b| bil.pair_current(a, b)));
        j0.push(Bilinears::weighted(w, &u, |a, b| bil.pair_density(a, b)));
    }
    Ok((j1, j0))
}

fn sample_pair(
    values_at: impl Fn(f64) -> Result<Vec<[Complex64; 2]>>,
    bil: &Bilinears,
    n: usize,
    (i, j): (usize, usize),
    grid: &Grid,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if i >= n || j >= n {
        return Err(GceError::PairOutOfRange(i, j, n));
    }
    let mut j1 = Vec::with_capacity(grid.len());
    let mut j0 = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let u = values_at(x)?;
        j1.push(bil.pair_current(&u[i], &u[j]));
        j0.push(bil.pair_density(&u[i], &u[j]));
    }
    Ok((j1, j0))
}

fn check_rank(n: usize, basis: &SunBasis) -> Result<()> {
    if n != basis.rank() {
        return Err(GceError::DimensionMismatch {
            expected: basis.rank(),
            found: n,
        });
    }
    Ok(())
}

fn profile(kind: CurrentKind, index: CurrentIndex, grid: &Grid, (j1, j0): (Vec<Complex64>, Vec<Complex64>)) -> CurrentProfile {
    CurrentProfile {
        kind,
        index,
        grid: grid.points().to_vec(),
        j1,
        j0,
        domain_stats: Vec::new(),
    }
}

/// `J^a_μ = Ψ̄ (γ^μ ⊗ T_a) Ψ` on `grid`.
pub fn dirac_current(stack: &DiracStack, a: usize, basis: &SunBasis, grid: &Grid) -> Result<CurrentProfile> {
    check_rank(stack.n_systems(), basis)?;
    let bil = Bilinears::dirac(stack.convention()?);
    let w = basis.generator(a)?;
    let data = sample_weighted(|x| stack.values_at(x, Side::Right), &bil, w, grid)?;
    Ok(profile(CurrentKind::Dirac, CurrentIndex::Generator(a), grid, data))
}

/// `J_ij,μ = ψ̄_i γ^μ ψ_j` evaluated directly.
pub fn dirac_pair_current(stack: &DiracStack, i: usize, j: usize, grid: &Grid) -> Result<CurrentProfile> {
    let bil = Bilinears::dirac(stack.convention()?);
    let data = sample_pair(|x| stack.values_at(x, Side::Right), &bil, stack.n_systems(), (i, j), grid)?;
    Ok(profile(CurrentKind::Dirac, CurrentIndex::Pair(i, j), grid, data))
}

/// `J_ij` assembled from the generator currents: E_ij = δ_ij/N·𝟙 + Σ_a 2(T_a)_ji T_a.
pub fn ladder_pair_current(
    generator_currents: &[CurrentProfile],
    total: Option<&CurrentProfile>,
    basis: &SunBasis,
    i: usize,
    j: usize,
) -> Result<CurrentProfile> {
    let weights = basis.matrix_unit_weights(i, j)?;
    if generator_currents.len() != basis.dim() {
        return Err(GceError::DimensionMismatch {
            expected: basis.dim(),
            found: generator_currents.len(),
        });
    }
    let first = &generator_currents[0];
    let len = first.grid.len();
    let mut j1 = vec![Complex64::new(0.0, 0.0); len];
    let mut j0 = j1.clone();
    for (w, cur) in weights.iter().zip(generator_currents) {
        if cur.grid != first.grid {
            return Err(GceError::GridMismatch("generator currents use different grids".into()));
        }
        for k in 0..len {
            j1[k] += w * cur.j1[k];
            j0[k] += w * cur.j0[k];
        }
    }
    if i == j {
        let total = total.ok_or_else(|| {
            GceError::InvalidArgument("diagonal pairs need the identity-weighted current".into())
        })?;
        let scale = 1.0 / basis.rank() as f64;
        for k in 0..len {
            j1[k] += total.j1[k] * scale;
            j0[k] += total.j0[k] * scale;
        }
    }
    Ok(CurrentProfile {
        kind: first.kind,
        index: CurrentIndex::Pair(i, j),
        grid: first.grid.clone(),
        j1,
        j0,
        domain_stats: Vec::new(),
    })
}

/// Identity-weighted Dirac current Ψ̄ (γ^μ ⊗ 𝟙) Ψ, the U(1) complement of the generators.
pub fn dirac_total_current(stack: &DiracStack, grid: &Grid) -> Result<CurrentProfile> {
    let bil = Bilinears::dirac(stack.convention()?);
    let w = identity(stack.n_systems());
    let data = sample_weighted(|x| stack.values_at(x, Side::Right), &bil, &w, grid)?;
    Ok(profile(CurrentKind::Dirac, CurrentIndex::Total, grid, data))
}

/// `j0 = Ψ† T_a Ψ`, `j1 = (i/2m)[∂Ψ† T_a Ψ − Ψ† T_a ∂Ψ]`.
pub fn schrodinger_current(
    stack: &WaveStack,
    a: usize,
    basis: &SunBasis,
    grid: &Grid,
    mass: f64,
) -> Result<CurrentProfile> {
    check_rank(stack.n_systems(), basis)?;
    let bil = schrodinger_bilinears(stack, mass)?;
    let w = basis.generator(a)?;
    let data = sample_weighted(|x| stack.values_at(x, Side::Right), &bil, w, grid)?;
    Ok(profile(CurrentKind::Schrodinger, CurrentIndex::Generator(a), grid, data))
}

pub fn schrodinger_pair_current(
    stack: &WaveStack,
    i: usize,
    j: usize,
    grid: &Grid,
    mass: f64,
) -> Result<CurrentProfile> {
    let bil = schrodinger_bilinears(stack, mass)?;
    let data = sample_pair(|x| stack.values_at(x, Side::Right), &bil, stack.n_systems(), (i, j), grid)?;
    Ok(profile(CurrentKind::Schrodinger, CurrentIndex::Pair(i, j), grid, data))
}

pub(crate) fn schrodinger_bilinears(stack: &WaveStack, mass: f64) -> Result<Bilinears> {
    let own = stack.mass()?;
    if own != mass {
        return Err(GceError::InvalidArgument(format!(
            "mass {mass} differs from the solutions' mass {own}"
        )));
    }
    Ok(Bilinears::Schrodinger { mass })
}

fn single_system(sol: &SpinorSolution, which: &str) -> Result<()> {
    if sol.n_systems() != 1 {
        return Err(GceError::InvalidArgument(format!(
            "{which} must be a single-system solution, got {} systems",
            sol.n_systems()
        )));
    }
    Ok(())
}

/// `ψ̄_1(x) γ^μ P ψ_2(F(x))` for single-system solutions, P the spinor factor of F.
///
/// With the identity transform this is bit-for-bit the plain pair current.
pub fn transformed_current(
    sol1: &SpinorSolution,
    sol2: &SpinorSolution,
    spec: &TransformSpec,
    grid: &Grid,
    domains: &[Domain],
) -> Result<CurrentProfile> {
    single_system(sol1, "sol1")?;
    single_system(sol2, "sol2")?;
    if sol1.convention() != sol2.convention() {
        return Err(GceError::MixedConventions);
    }
    let bil = Bilinears::dirac(sol1.convention());
    let mut j1 = Vec::with_capacity(grid.len());
    let mut j0 = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let (u, v) = transformed_pair(sol1, sol2, spec, x, Side::Right)?;
        j1.push(bil.pair_current(&u, &v));
        j0.push(bil.pair_density(&u, &v));
    }
    Ok(CurrentProfile {
        kind: CurrentKind::Dirac,
        index: CurrentIndex::Transformed,
        grid: grid.points().to_vec(),
        j1,
        j0,
        domain_stats: Vec::new(),
    }
    .with_domains(domains))
}

/// `(ψ_1(x), P ψ_2(F(x)))` with the one-sided limits matching `side` at x.
pub(crate) fn transformed_pair(
    sol1: &SpinorSolution,
    sol2: &SpinorSolution,
    spec: &TransformSpec,
    x: f64,
    side: Side,
) -> Result<([Complex64; 2], [Complex64; 2])> {
    let u = sol1.system_value(0, x, side)?;
    let y = spec.map(x);
    if !y.is_finite() {
        return Err(GceError::OutsideDomain(y));
    }
    let raw = sol2.system_value(0, y, spec.mapped_side(side))?;
    Ok((u, apply(spec.spinor_factor(), &raw)))
}

pub(crate) fn apply(m: &CMatrix, v: &[Complex64; 2]) -> [Complex64; 2] {
    if *m == identity(2) {
        return *v;
    }
    [
        m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
        m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
    ]
}
