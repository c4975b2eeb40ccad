//! Small dense complex matrix helpers shared by the algebra and solver layers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{GceError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

/// Pauli matrices σ_x, σ_y, σ_z.
pub fn pauli() -> [CMatrix; 3] {
    [
        from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
    ]
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Tolerance applied to user-supplied Hermitian matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(GceError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL * (1.0 + max_abs(m)) {
        return Err(GceError::NotHermitian(dev));
    }
    Ok(())
}

pub fn is_diagonal(m: &CMatrix, tol: f64) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() <= tol))
}

/// Matrix exponential of a small dense complex matrix.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// u† m v for vectors given as slices.
pub fn bilinear(u: &[Complex64], m: &CMatrix, v: &[Complex64]) -> Complex64 {
    let mut acc = ZERO;
    for (s, us) in u.iter().enumerate() {
        let mut row = ZERO;
        for (t, vt) in v.iter().enumerate() {
            row += m[(s, t)] * vt;
        }
        acc += us.conj() * row;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let [sx, sy, sz] = pauli();
        assert!(max_abs_diff(&(&sx * &sy), &(&sz * I)) < 1e-15);
        assert!(max_abs_diff(&(&sx * &sx), &identity(2)) < 1e-15);
    }

    #[test]
    fn exp_of_rotation_generator() {
        let [_, sy, _] = pauli();
        let theta = 0.7_f64;
        let e = expm(&(&sy * c(0.0, theta)));
        let expected = from_rows(&[
            &[c(theta.cos(), 0.0), c(theta.sin(), 0.0)],
            &[c(-theta.sin(), 0.0), c(theta.cos(), 0.0)],
        ]);
        assert!(max_abs_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = from_rows(&[&[ONE, ONE], &[ZERO, ONE]]);
        assert!(matches!(ensure_hermitian(&m), Err(GceError::NotHermitian(_))));
    }
}
