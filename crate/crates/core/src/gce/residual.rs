//! Pointwise residuals of the stationary generalized continuity equations
//!
//! `Σ_ij W_ij i(E_i − E_j) ρ_ij + d/dx J_W − source_W = 0`,
//!
//! where `W` is a generator `T_a` or a matrix unit `E_ij`, the source is built from
//! `i[V, W]`, and the derivative is a second-order finite difference.

use num_complex::Complex64;
use serde::Serialize;

use super::currents::{schrodinger_bilinears, CurrentKind, CurrentProfile};
use super::domains::Domain;
use super::stack::{matrix_unit, Bilinears, DiracStack, WaveStack};
use crate::algebra::{source_operator, PotentialDecomposition, SunBasis};
use crate::error::{GceError, Result};
use crate::field::PiecewiseMatrix;
use crate::grid::{Grid, Side};
use crate::linalg::{commutator, CMatrix, I, ZERO};
use crate::profile::merge_positions;

/// Relative residual above which a report flags its input as not solving the equation.
pub const NON_SOLUTION_THRESHOLD: f64 = 0.05;

/// Which weight matrix the GCE is formed with (zero-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Generator(usize),
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainVerdict {
    pub domain: Domain,
    pub n_samples: usize,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GceReport {
    pub target: Target,
    pub kind: CurrentKind,
    /// Positions of the residual samples.
    pub grid: Vec<f64>,
    /// Times of the residual rows; empty for stationary residuals (one row).
    pub times: Vec<f64>,
    /// Row-major over `times` × `grid`.
    pub residual: Vec<Complex64>,
    /// Root mean square of the residual.
    pub residual_norm: f64,
    /// Root mean square of the summed magnitudes of the balanced terms.
    pub scale: f64,
    pub spacing: f64,
    pub convergence_order: Option<f64>,
    pub domain_verdicts: Vec<DomainVerdict>,
}

impl GceReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual_norm / self.scale.max(f64::MIN_POSITIVE)
    }

    /// True when the residual is comparable to the terms it balances.
    pub fn is_non_solution(&self) -> bool {
        self.relative_residual() > NON_SOLUTION_THRESHOLD
    }

    /// Records `log2(norm / finer.norm)` from a run at half the spacing.
    pub fn with_convergence(mut self, finer: &GceReport) -> Self {
        self.convergence_order = Some(convergence_order(self.residual_norm, finer.residual_norm));
        self
    }

    /// Judges constancy of `current` on each domain against `tol`.
    pub fn with_domain_verdicts(mut self, current: &CurrentProfile, domains: &[Domain], tol: f64) -> Self {
        self.domain_verdicts = domains
            .iter()
            .map(|d| {
                let stat = current.stat(d);
                DomainVerdict {
                    domain: d.clone(),
                    n_samples: stat.n_samples,
                    deviation: stat.max_deviation,
                    pass: stat.n_samples > 0 && stat.max_deviation <= tol,
                }
            })
            .collect();
        self
    }
}

/// Observed order from residual norms at spacings h and h/2.
pub fn convergence_order(norm_h: f64, norm_half: f64) -> f64 {
    (norm_h / norm_half).log2()
}

#[derive(Debug, Clone, Copy)]
struct Terms {
    time: Complex64,
    current: Complex64,
    source: Complex64,
}

/// Weight matrix and source-matrix field for a target.
fn target_operators(
    n: usize,
    basis: &SunBasis,
    target: Target,
    decomp: &PotentialDecomposition,
) -> Result<(CMatrix, PiecewiseMatrix)> {
    for found in [n, decomp.rank()] {
        if found != basis.rank() {
            return Err(GceError::DimensionMismatch {
                expected: basis.rank(),
                found,
            });
        }
    }
    match target {
        Target::Generator(a) => Ok((basis.generator(a)?.clone(), source_operator(a, decomp, basis)?)),
        Target::Pair(i, j) => {
            let w = matrix_unit(n, i, j)?;
            let v = decomp.reconstruct_field(basis);
            Ok((w.clone(), v.map(|vc| commutator(vc, &w) * I)))
        }
    }
}

/// Cell `(lo, hi)` between breakpoints holding `x`, taken on `side` when `x` is a
/// breakpoint itself.
fn cell(bps: &[f64], x: f64, side: Side, tol: f64) -> (f64, f64) {
    let below = bps.iter().rev().find(|&&b| b < x - tol).copied().unwrap_or(f64::NEG_INFINITY);
    let above = bps.iter().find(|&&b| b > x + tol).copied().unwrap_or(f64::INFINITY);
    match bps.iter().find(|&&b| (b - x).abs() <= tol) {
        Some(&b) => match side {
            Side::Right => (b, above),
            Side::Left => (below, b),
        },
        None => (below, above),
    }
}

#[derive(Clone, Copy)]
enum Stencil {
    Centered,
    Forward,
    Backward,
}

struct Assembler<'a, F> {
    values: F,
    bil: &'a Bilinears,
    time_weight: CMatrix,
    weight: &'a CMatrix,
    source: &'a PiecewiseMatrix,
    points: &'a [f64],
    cache: [Vec<Option<Terms>>; 2],
}

impl<F: Fn(f64, Side) -> Result<Vec<[Complex64; 2]>>> Assembler<'_, F> {
    fn terms(&mut self, k: usize, side: Side) -> Result<Terms> {
        let slot = match side {
            Side::Left => 0,
            Side::Right => 1,
        };
        if let Some(t) = self.cache[slot][k] {
            return Ok(t);
        }
        let x = self.points[k];
        let u = (self.values)(x, side)?;
        let bil = self.bil;
        let t = Terms {
            time: Bilinears::weighted(&self.time_weight, &u, |a, b| bil.pair_density(a, b)),
            current: Bilinears::weighted(self.weight, &u, |a, b| bil.pair_current(a, b)),
            source: Bilinears::weighted(self.source.at(x, side), &u, |a, b| bil.pair_source(a, b)),
        };
        self.cache[slot][k] = Some(t);
        Ok(t)
    }
}

/// Residual samples, RMS norm, RMS scale and grid spacing.
fn stationary_residual(
    values: impl Fn(f64, Side) -> Result<Vec<[Complex64; 2]>>,
    energies: &[f64],
    bil: &Bilinears,
    weight: &CMatrix,
    source: &PiecewiseMatrix,
    breakpoints: Vec<f64>,
    grid: &Grid,
) -> Result<(Vec<Complex64>, f64, f64, f64)> {
    let h = grid.spacing()?;
    let tol = 1e-9 * h;
    let n = energies.len();
    let mut time_weight = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if weight[(i, j)] != ZERO {
                time_weight[(i, j)] = weight[(i, j)] * I * (energies[i] - energies[j]);
            }
        }
    }
    let bps = merge_positions(breakpoints.into_iter().chain(source.edges().iter().copied()));
    let points = grid.points();
    let len = points.len();
    let mut asm = Assembler {
        values,
        bil,
        time_weight,
        weight,
        source,
        points,
        cache: [vec![None; len], vec![None; len]],
    };
    let mut residual = Vec::with_capacity(len);
    let (mut sq, mut scale_sq) = (0.0, 0.0);
    for k in 0..len {
        let x = points[k];
        let on_bp = bps.iter().any(|&b| (b - x).abs() <= tol);
        let fits = |m: isize, (lo, hi): (f64, f64)| {
            m >= 0 && (m as usize) < len && points[m as usize] >= lo - tol && points[m as usize] <= hi + tol
        };
        let ki = k as isize;
        let right = cell(&bps, x, Side::Right, tol);
        let left = cell(&bps, x, Side::Left, tol);
        let choice = if !on_bp && fits(ki - 1, right) && fits(ki + 1, right) {
            Some((Stencil::Centered, right, Side::Right))
        } else if fits(ki + 1, right) && fits(ki + 2, right) {
            Some((Stencil::Forward, right, Side::Right))
        } else if fits(ki - 1, left) && fits(ki - 2, left) {
            Some((Stencil::Backward, left, Side::Left))
        } else {
            None
        };
        let (stencil, (lo, hi), side) = choice.ok_or_else(|| {
            GceError::InvalidGrid(format!(
                "fewer than three grid points between breakpoints around x = {x}"
            ))
        })?;
        let side_of = |m: usize| {
            if (points[m] - hi).abs() <= tol {
                Side::Left
            } else if (points[m] - lo).abs() <= tol {
                Side::Right
            } else {
                side
            }
        };
        let here = asm.terms(k, side)?;
        let mut j = |m: usize| -> Result<Complex64> { Ok(asm.terms(m, side_of(m))?.current) };
        let derivative = match stencil {
            Stencil::Centered => (j(k + 1)? - j(k - 1)?) / (2.0 * h),
            Stencil::Forward => (here.current * -3.0 + j(k + 1)? * 4.0 - j(k + 2)?) / (2.0 * h),
            Stencil::Backward => (here.current * 3.0 - j(k - 1)? * 4.0 + j(k - 2)?) / (2.0 * h),
        };
        let r = here.time + derivative - here.source;
        sq += r.norm_sqr();
        let mag = here.time.norm() + derivative.norm() + here.source.norm();
        scale_sq += mag * mag;
        residual.push(r);
    }
    let count = len as f64;
    Ok((residual, (sq / count).sqrt(), (scale_sq / count).sqrt(), h))
}

fn report(
    target: Target,
    kind: CurrentKind,
    grid: &Grid,
    (residual, residual_norm, scale, spacing): (Vec<Complex64>, f64, f64, f64),
) -> GceReport {
    GceReport {
        target,
        kind,
        grid: grid.points().to_vec(),
        times: Vec::new(),
        residual,
        residual_norm,
        scale,
        spacing,
        convergence_order: None,
        domain_verdicts: Vec::new(),
    }
}

/// Stationary Dirac GCE residual for `target` on a uniform grid.
pub fn gce_residual_dirac(
    stack: &DiracStack,
    basis: &SunBasis,
    target: Target,
    grid: &Grid,
    decomp: &PotentialDecomposition,
) -> Result<GceReport> {
    let bil = Bilinears::dirac(stack.convention()?);
    let (w, s) = target_operators(stack.n_systems(), basis, target, decomp)?;
    let parts = stationary_residual(
        |x, side| stack.values_at(x, side),
        &stack.energies(),
        &bil,
        &w,
        &s,
        stack.breakpoints(),
        grid,
    )?;
    Ok(report(target, CurrentKind::Dirac, grid, parts))
}

/// Stationary Schrödinger GCE residual for `target` on a uniform grid.
pub fn gce_residual_schrodinger(
    stack: &WaveStack,
    basis: &SunBasis,
    target: Target,
    grid: &Grid,
    decomp: &PotentialDecomposition,
    mass: f64,
) -> Result<GceReport> {
    let bil = schrodinger_bilinears(stack, mass)?;
    let (w, s) = target_operators(stack.n_systems(), basis, target, decomp)?;
    let parts = stationary_residual(
        |x, side| stack.values_at(x, side),
        &stack.energies(),
        &bil,
        &w,
        &s,
        stack.breakpoints(),
        grid,
    )?;
    Ok(report(target, CurrentKind::Schrodinger, grid, parts))
}

/// Dirac residual on `grid` with the convergence order measured against its refinement.
pub fn gce_convergence_dirac(
    stack: &DiracStack,
    basis: &SunBasis,
    target: Target,
    grid: &Grid,
    decomp: &PotentialDecomposition,
) -> Result<GceReport> {
    let coarse = gce_residual_dirac(stack, basis, target, grid, decomp)?;
    let fine = gce_residual_dirac(stack, basis, target, &grid.refined()?, decomp)?;
    Ok(coarse.with_convergence(&fine))
}

/// Schrödinger counterpart of [`gce_convergence_dirac`].
pub fn gce_convergence_schrodinger(
    stack: &WaveStack,
    basis: &SunBasis,
    target: Target,
    grid: &Grid,
    decomp: &PotentialDecomposition,
    mass: f64,
) -> Result<GceReport> {
    let coarse = gce_residual_schrodinger(stack, basis, target, grid, decomp, mass)?;
    let fine = gce_residual_schrodinger(stack, basis, target, &grid.refined()?, decomp, mass)?;
    Ok(coarse.with_convergence(&fine))
}
