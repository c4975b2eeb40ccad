//! Symmetry transforms F(x) = σx + ρ and exact detection of the intervals on which
//! two systems' potentials agree under F.

use serde::Serialize;

use crate::error::{GceError, Result};
use crate::grid::Side;
use crate::linalg::{identity, CMatrix};
use crate::profile::{merge_positions, PotentialProfile, POSITION_TOL};
use crate::solvers::Convention;

/// Coordinate map `F(x) = σx + ρ` plus the matrix applied to the mapped spinor.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformSpec {
    sigma: i8,
    rho: f64,
    spinor_factor: CMatrix,
}

impl TransformSpec {
    pub fn identity() -> Self {
        Self {
            sigma: 1,
            rho: 0.0,
            spinor_factor: identity(2),
        }
    }

    /// `F(x) = x + l`.
    pub fn translation(l: f64) -> Self {
        Self {
            rho: l,
            ..Self::identity()
        }
    }

    /// Inversion about `center`: `F(x) = 2·center − x`, spinor factor γ⁰.
    pub fn parity(center: f64, convention: &Convention) -> Self {
        Self {
            sigma: -1,
            rho: 2.0 * center,
            spinor_factor: convention.parity_matrix(),
        }
    }

    /// Dirac transform with the spinor factor fixed by `convention`.
    pub fn new(sigma: i8, rho: f64, convention: &Convention) -> Result<Self> {
        match sigma {
            1 => Ok(Self::translation(rho)),
            -1 => Ok(Self::parity(rho / 2.0, convention)),
            _ => Err(GceError::InvalidArgument(format!("sigma must be +1 or -1, got {sigma}"))),
        }
    }

    /// Transform acting on scalar wavefunctions (unit spinor factor).
    pub fn scalar(sigma: i8, rho: f64) -> Result<Self> {
        if sigma != 1 && sigma != -1 {
            return Err(GceError::InvalidArgument(format!("sigma must be +1 or -1, got {sigma}")));
        }
        Ok(Self {
            sigma,
            rho,
            spinor_factor: identity(2),
        })
    }

    pub fn sigma(&self) -> i8 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn spinor_factor(&self) -> &CMatrix {
        &self.spinor_factor
    }

    pub fn map(&self, x: f64) -> f64 {
        f64::from(self.sigma) * x + self.rho
    }

    pub fn inverse(&self, y: f64) -> f64 {
        // `+ 0.0` turns a signed zero into +0 so reported bounds read `0`.
        f64::from(self.sigma) * (y - self.rho) + 0.0
    }

    /// Side of `F(x)` approached when `x` is approached from `side`.
    pub fn mapped_side(&self, side: Side) -> Side {
        match (self.sigma, side) {
            (1, s) => s,
            (_, Side::Left) => Side::Right,
            (_, Side::Right) => Side::Left,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma == 1 && self.rho == 0.0
    }
}

/// Open interval `(x_lo, x_hi)` on which a symmetry condition holds; bounds may be
/// infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub x_lo: f64,
    pub x_hi: f64,
    pub transform: TransformSpec,
}

impl Domain {
    pub fn new(x_lo: f64, x_hi: f64, transform: TransformSpec) -> Result<Self> {
        if !(x_lo < x_hi) {
            return Err(GceError::InvalidArgument(format!(
                "domain needs x_lo < x_hi, got ({x_lo}, {x_hi})"
            )));
        }
        Ok(Self { x_lo, x_hi, transform })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.x_lo < x && x < self.x_hi
    }

    pub fn bounds(&self) -> DomainBounds {
        DomainBounds {
            x_lo: self.x_lo,
            x_hi: self.x_hi,
        }
    }
}

/// Serializable view of a domain's extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainBounds {
    pub x_lo: f64,
    pub x_hi: f64,
}

/// Largest deviation from `V_ii(x) = V_jj(F(x))` at `x`, including any coupling of
/// system `i` (at x) or `j` (at F(x)) to the other systems, which would also feed the
/// pair source.
fn mismatch(profile: &PotentialProfile, i: usize, j: usize, spec: &TransformSpec, x: f64) -> f64 {
    let vi = profile.value_at(x, Side::Right);
    let vj = profile.value_at(spec.map(x), Side::Right);
    let mut worst = (vi[(i, i)] - vj[(j, j)]).norm();
    for k in 0..profile.n_systems() {
        if k != i {
            worst = worst.max(vi[(i, k)].norm());
        }
        if k != j {
            worst = worst.max(vj[(j, k)].norm());
        }
    }
    worst
}

fn delta_mismatch(profile: &PotentialProfile, i: usize, j: usize, spec: &TransformSpec, x: f64) -> f64 {
    let n = profile.n_systems();
    let zero = CMatrix::zeros(n, n);
    let si = profile.delta_at(x).unwrap_or(&zero);
    let sj = profile.delta_at(spec.map(x)).unwrap_or(&zero);
    let mut worst = (si[(i, i)] - sj[(j, j)]).norm();
    for k in 0..n {
        if k != i {
            worst = worst.max(si[(i, k)].norm());
        }
        if k != j {
            worst = worst.max(sj[(j, k)].norm());
        }
    }
    worst
}

/// Maximal open intervals on which `|V_i(x) − V_j(F(x))| ≤ tol`, computed from the
/// segment breakpoints. Delta barriers that do not match under F split domains.
pub fn detect_domains(
    profile: &PotentialProfile,
    pair: (usize, usize),
    spec: &TransformSpec,
    tol: f64,
) -> Result<Vec<Domain>> {
    let (i, j) = pair;
    let n = profile.n_systems();
    if i >= n || j >= n {
        return Err(GceError::PairOutOfRange(i, j, n));
    }
    if !(tol > 0.0) {
        return Err(GceError::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let edges = profile.edges();
    let cuts = merge_positions(
        edges
            .iter()
            .copied()
            .chain(edges.iter().map(|&e| spec.inverse(e))),
    );
    // Interval k spans (cuts[k-1], cuts[k]) with cuts[-1] = -∞ and cuts[m] = +∞.
    let m = cuts.len();
    let bound = |k: isize| -> f64 {
        if k < 0 {
            f64::NEG_INFINITY
        } else if k as usize >= m {
            f64::INFINITY
        } else {
            cuts[k as usize]
        }
    };
    let probe = |k: usize| -> f64 {
        let (lo, hi) = (bound(k as isize - 1), bound(k as isize));
        match (lo.is_finite(), hi.is_finite()) {
            (false, _) => hi - 1.0,
            (_, false) => lo + 1.0,
            _ => 0.5 * (lo + hi),
        }
    };
    let mut domains: Vec<Domain> = Vec::new();
    let mut open: Option<f64> = None;
    for k in 0..=m {
        let lo = bound(k as isize - 1);
        let matched = mismatch(profile, i, j, spec, probe(k)) <= tol;
        if let Some(start) = open {
            // Interval k continues the running domain only across a matching delta.
            let splits = delta_mismatch(profile, i, j, spec, lo) > tol;
            if !matched || splits {
                domains.push(Domain::new(start, lo, spec.clone())?);
                open = None;
            }
        }
        if matched && open.is_none() {
            open = Some(lo);
        }
    }
    if let Some(start) = open {
        domains.push(Domain::new(start, f64::INFINITY, spec.clone())?);
    }
    Ok(domains)
}

/// Positions closer than [`POSITION_TOL`] count as the same domain edge.
pub(crate) fn same_position(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= POSITION_TOL * (1.0 + a.abs())
}
