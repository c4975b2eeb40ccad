//! Piecewise-constant matrix fields over the real line.

use crate::error::{GceError, Result};
use crate::grid::Side;
use crate::linalg::CMatrix;

/// Index of the cell of `edges` holding `x`, with the outer cells extended to ±∞.
///
/// `edges` has one more entry than there are cells. A point sitting exactly on an
/// interior edge belongs to the cell picked by `side`.
pub(crate) fn locate(edges: &[f64], x: f64, side: Side) -> usize {
    let cells = edges.len() - 1;
    let above = match side {
        Side::Right => edges.partition_point(|&e| e <= x),
        Side::Left => edges.partition_point(|&e| e < x),
    };
    above.saturating_sub(1).min(cells - 1)
}

/// Matrix-valued function that is constant on each cell `[edges[k], edges[k+1]]`.
/// The first and last values extend to -∞ and +∞.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMatrix {
    edges: Vec<f64>,
    values: Vec<CMatrix>,
}

impl PiecewiseMatrix {
    pub fn new(edges: Vec<f64>, values: Vec<CMatrix>) -> Result<Self> {
        if values.is_empty() {
            return Err(GceError::EmptyProfile);
        }
        if edges.len() != values.len() + 1 {
            return Err(GceError::DimensionMismatch {
                expected: values.len() + 1,
                found: edges.len(),
            });
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GceError::InvalidProfile("cell edges must increase".into()));
        }
        let dim = values[0].nrows();
        if let Some(bad) = values.iter().find(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(GceError::DimensionMismatch {
                expected: dim,
                found: bad.nrows(),
            });
        }
        Ok(Self { edges, values })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[CMatrix] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn cell(&self, x: f64, side: Side) -> usize {
        locate(&self.edges, x, side)
    }

    pub fn at(&self, x: f64, side: Side) -> &CMatrix {
        &self.values[self.cell(x, side)]
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            edges: self.edges.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_respects_sides_and_extension() {
        let edges = [0.0, 1.0, 2.0];
        assert_eq!(locate(&edges, -5.0, Side::Right), 0);
        assert_eq!(locate(&edges, 0.5, Side::Left), 0);
        assert_eq!(locate(&edges, 1.0, Side::Left), 0);
        assert_eq!(locate(&edges, 1.0, Side::Right), 1);
        assert_eq!(locate(&edges, 2.0, Side::Right), 1);
        assert_eq!(locate(&edges, 9.0, Side::Left), 1);
    }
}
