use crate::error::{GceError, Result};
use crate::linalg::{c, commutator, CMatrix, ZERO};

/// Where a generator sits in the generalized Gell-Mann enumeration.
///
/// Rows and columns are zero-based; `level` is the `n` of the Cartan generator
/// `diag(1, .., 1, -(n-1), 0, ..) / sqrt(2n(n-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Symmetric { row: usize, col: usize },
    Antisymmetric { row: usize, col: usize },
    Cartan { level: usize },
}

/// Dense table of structure constants `f_abc`, defined by `[T_a, T_b] = i f_abc T_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    /// Entries with `a < b < c` and `|f_abc| > tol`; the rest follow by antisymmetry.
    pub fn nonzero_ordered(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                for c in b + 1..d {
                    let f = self.get(a, b, c);
                    if f.abs() > tol {
                        out.push((a, b, c, f));
                    }
                }
            }
        }
        out
    }
}

/// Threshold above which an imaginary part of `f_abc` marks the basis as broken.
const IMAG_LIMIT: f64 = 1e-10;

/// `f_abc = -2i Tr([T_a, T_b] T_c)`, assuming `Tr(T_a T_b) = δ_ab / 2`.
pub fn structure_constants(generators: &[CMatrix]) -> Result<StructureConstants> {
    let d = generators.len();
    let mut data = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            let comm = commutator(&generators[a], &generators[b]);
            for (k, t) in generators.iter().enumerate() {
                let value = c(0.0, -2.0) * (&comm * t).trace();
                if value.im.abs() > IMAG_LIMIT {
                    return Err(GceError::InconsistentBasis {
                        a,
                        b,
                        c: k,
                        imag: value.im,
                    });
                }
                data[(a * d + b) * d + k] = value.re;
            }
        }
    }
    Ok(StructureConstants { dim: d, data })
}

/// Generators of su(N) in the fundamental representation together with `f_abc`.
#[derive(Debug, Clone, PartialEq)]
pub struct SunBasis {
    n: usize,
    generators: Vec<CMatrix>,
    kinds: Vec<GeneratorKind>,
    f: StructureConstants,
}

/// Generalized Gell-Mann basis for su(n).
///
/// For each level `n = 2..=N` the symmetric/antisymmetric pairs coupling row `m < n`
/// to row `n` come first, then the level's Cartan generator, so Cartan generators sit
/// at zero-based index `n² - 2`. For N = 2 this gives `σ_x/2, σ_y/2, σ_z/2`.
pub fn build_basis(n: usize) -> Result<SunBasis> {
    if n < 2 {
        return Err(GceError::InvalidRank(n));
    }
    let mut generators = Vec::with_capacity(n * n - 1);
    let mut kinds = Vec::with_capacity(n * n - 1);
    for level in 2..=n {
        let col = level - 1;
        for row in 0..col {
            let mut sym = CMatrix::zeros(n, n);
            sym[(row, col)] = c(0.5, 0.0);
            sym[(col, row)] = c(0.5, 0.0);
            generators.push(sym);
            kinds.push(GeneratorKind::Symmetric { row, col });

            let mut anti = CMatrix::zeros(n, n);
            anti[(row, col)] = c(0.0, -0.5);
            anti[(col, row)] = c(0.0, 0.5);
            generators.push(anti);
            kinds.push(GeneratorKind::Antisymmetric { row, col });
        }
        let scale = 1.0 / ((2 * level * (level - 1)) as f64).sqrt();
        let mut cartan = CMatrix::from_element(n, n, ZERO);
        for k in 0..col {
            cartan[(k, k)] = c(scale, 0.0);
        }
        cartan[(col, col)] = c(-((level - 1) as f64) * scale, 0.0);
        generators.push(cartan);
        kinds.push(GeneratorKind::Cartan { level });
    }
    let f = structure_constants(&generators)?;
    Ok(SunBasis {
        n,
        generators,
        kinds,
        f,
    })
}

impl SunBasis {
    pub fn new(n: usize) -> Result<Self> {
        build_basis(n)
    }

    /// The N in SU(N).
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Number of generators, N² - 1.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> Result<&CMatrix> {
        self.generators.get(a).ok_or(GceError::IndexOutOfRange {
            index: a,
            len: self.dim(),
        })
    }

    pub fn kind(&self, a: usize) -> GeneratorKind {
        self.kinds[a]
    }

    pub fn is_cartan(&self, a: usize) -> bool {
        matches!(self.kinds.get(a), Some(GeneratorKind::Cartan { .. }))
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.f
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.f.get(a, b, c)
    }

    /// Coefficients `w_a` with `E_ij = δ_ij/N · 1 + Σ_a w_a T_a`, where `E_ij` is the
    /// matrix unit; `w_a = 2 (T_a)_ji`.
    pub fn matrix_unit_weights(&self, i: usize, j: usize) -> Result<Vec<num_complex::Complex64>> {
        if i >= self.n || j >= self.n {
            return Err(GceError::PairOutOfRange(i, j, self.n));
        }
        Ok(self
            .generators
            .iter()
            .map(|t| t[(j, i)] * 2.0)
            .collect())
    }
}
