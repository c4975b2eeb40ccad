use num_complex::Complex64;

use super::basis::SunBasis;
use crate::error::{GceError, Result};
use crate::field::PiecewiseMatrix;
use crate::grid::Side;
use crate::linalg::{c, ensure_hermitian, CMatrix};

/// `V(x) = v0(x)·1 + Σ_k c_k(x) T_k` on the cells of a piecewise-constant potential.
///
/// Coefficients use `c_k = 2 Tr(V T_k)`, which with `Tr(T_a T_b) = δ_ab/2` makes the
/// reconstruction exact and gives e.g. `c_3 = V_11 - V_22` for SU(2).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialDecomposition {
    n: usize,
    edges: Vec<f64>,
    v0: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
}

/// Largest imaginary part tolerated in a coefficient of a Hermitian matrix.
const COEFF_IMAG_TOL: f64 = 1e-12;

/// Decompose a single Hermitian matrix; returns `(v0, [c_k])`.
pub fn decompose_matrix(v: &CMatrix, basis: &SunBasis) -> Result<(f64, Vec<f64>)> {
    let n = basis.rank();
    if v.nrows() != n || v.ncols() != n {
        return Err(GceError::DimensionMismatch {
            expected: n,
            found: v.nrows(),
        });
    }
    ensure_hermitian(v)?;
    let v0 = v.trace().re / n as f64;
    let mut coeffs = Vec::with_capacity(basis.dim());
    for t in basis.generators() {
        let value = (v * t).trace() * 2.0;
        if value.im.abs() > COEFF_IMAG_TOL * (1.0 + value.re.abs()) {
            return Err(GceError::NotHermitian(value.im.abs()));
        }
        coeffs.push(value.re);
    }
    Ok((v0, coeffs))
}

/// Decompose every cell of a piecewise-constant Hermitian matrix field.
pub fn decompose(field: &PiecewiseMatrix, basis: &SunBasis) -> Result<PotentialDecomposition> {
    let mut v0 = Vec::with_capacity(field.values().len());
    let mut coefficients = Vec::with_capacity(field.values().len());
    for m in field.values() {
        let (a, cs) = decompose_matrix(m, basis)?;
        v0.push(a);
        coefficients.push(cs);
    }
    Ok(PotentialDecomposition {
        n: basis.rank(),
        edges: field.edges().to_vec(),
        v0,
        coefficients,
    })
}

impl PotentialDecomposition {
    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn cells(&self) -> usize {
        self.v0.len()
    }

    pub fn v0(&self, cell: usize) -> f64 {
        self.v0[cell]
    }

    /// `c_k` for every generator on one cell.
    pub fn coefficients(&self, cell: usize) -> &[f64] {
        &self.coefficients[cell]
    }

    pub fn cell_at(&self, x: f64, side: Side) -> usize {
        crate::field::locate(&self.edges, x, side)
    }

    pub fn v0_at(&self, x: f64, side: Side) -> f64 {
        self.v0[self.cell_at(x, side)]
    }

    pub fn coefficients_at(&self, x: f64, side: Side) -> &[f64] {
        &self.coefficients[self.cell_at(x, side)]
    }

    /// `v0·1 + Σ c_k T_k` on one cell.
    pub fn reconstruct(&self, cell: usize, basis: &SunBasis) -> CMatrix {
        let mut m = CMatrix::identity(self.n, self.n) * c(self.v0[cell], 0.0);
        for (ck, t) in self.coefficients[cell].iter().zip(basis.generators()) {
            m += t * c(*ck, 0.0);
        }
        m
    }

    pub fn reconstruct_field(&self, basis: &SunBasis) -> PiecewiseMatrix {
        let values = (0..self.cells()).map(|k| self.reconstruct(k, basis)).collect();
        PiecewiseMatrix::new(self.edges.clone(), values).expect("edges already validated")
    }
}

/// `S_a(x) = Σ_{b,c} f_abc c_b(x) T_c`, the matrix appearing in the source of the
/// GCE for generator `a`. Equals `i[V(x), T_a]`.
pub fn source_operator(
    a: usize,
    decomp: &PotentialDecomposition,
    basis: &SunBasis,
) -> Result<PiecewiseMatrix> {
    if a >= basis.dim() {
        return Err(GceError::IndexOutOfRange {
            index: a,
            len: basis.dim(),
        });
    }
    if decomp.rank() != basis.rank() {
        return Err(GceError::DimensionMismatch {
            expected: basis.rank(),
            found: decomp.rank(),
        });
    }
    let n = basis.rank();
    let f = basis.structure_constants();
    let values = (0..decomp.cells())
        .map(|cell| {
            let coeffs = decomp.coefficients(cell);
            let mut s = CMatrix::zeros(n, n);
            for (b, cb) in coeffs.iter().enumerate() {
                if *cb == 0.0 {
                    continue;
                }
                for (k, t) in basis.generators().iter().enumerate() {
                    let w = f.get(a, b, k) * cb;
                    if w != 0.0 {
                        s += t * Complex64::new(w, 0.0);
                    }
                }
            }
            s
        })
        .collect();
    PiecewiseMatrix::new(decomp.edges.clone(), values)
}
