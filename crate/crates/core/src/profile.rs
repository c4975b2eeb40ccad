//! N-system piecewise-constant potential landscapes with delta barriers.

use crate::error::{GceError, Result};
use crate::field::{locate, PiecewiseMatrix};
use crate::grid::Side;
use crate::linalg::{c, ensure_hermitian, is_diagonal, real_diag, CMatrix};

/// Positions closer than this are treated as the same breakpoint.
pub const POSITION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Hermitian N×N potential matrix on `[x_lo, x_hi]`.
    pub v: CMatrix,
}

/// Delta barrier `strength · δ(x - x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Delta {
    pub x0: f64,
    pub strength: CMatrix,
}

/// Contiguous segments covering `[x_start, x_end]`; the first and last segment values
/// extend to -∞ and +∞. Deltas sit on segment boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    n_systems: usize,
    segments: Vec<Segment>,
    deltas: Vec<Delta>,
}

impl PotentialProfile {
    pub fn new(n_systems: usize, segments: Vec<Segment>, mut deltas: Vec<Delta>) -> Result<Self> {
        if n_systems == 0 {
            return Err(GceError::InvalidProfile("n_systems must be positive".into()));
        }
        if segments.is_empty() {
            return Err(GceError::EmptyProfile);
        }
        for (k, s) in segments.iter().enumerate() {
            if !(s.x_lo.is_finite() && s.x_hi.is_finite()) || s.x_lo >= s.x_hi {
                return Err(GceError::InvalidProfile(format!(
                    "segments[{k}] needs finite x_lo < x_hi, got [{}, {}]",
                    s.x_lo, s.x_hi
                )));
            }
            if s.v.nrows() != n_systems || s.v.ncols() != n_systems {
                return Err(GceError::InvalidProfile(format!(
                    "segments[{k}] potential is {}x{}, expected {n_systems}x{n_systems}",
                    s.v.nrows(),
                    s.v.ncols()
                )));
            }
            ensure_hermitian(&s.v).map_err(|_| {
                GceError::InvalidProfile(format!("segments[{k}] potential is not Hermitian"))
            })?;
        }
        for (k, w) in segments.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if b.x_lo < a.x_hi {
                return Err(GceError::InvalidProfile(format!(
                    "segments[{k}] [{}, {}] and segments[{}] [{}, {}] overlap",
                    a.x_lo,
                    a.x_hi,
                    k + 1,
                    b.x_lo,
                    b.x_hi
                )));
            }
            if b.x_lo > a.x_hi {
                return Err(GceError::InvalidProfile(format!(
                    "gap between segments[{k}] (ends at {}) and segments[{}] (starts at {})",
                    a.x_hi,
                    k + 1,
                    b.x_lo
                )));
            }
        }
        let mut edges: Vec<f64> = segments.iter().map(|s| s.x_lo).collect();
        edges.push(segments[segments.len() - 1].x_hi);

        deltas.sort_by(|a, b| a.x0.total_cmp(&b.x0));
        for (k, d) in deltas.iter_mut().enumerate() {
            if d.strength.nrows() != n_systems || d.strength.ncols() != n_systems {
                return Err(GceError::InvalidProfile(format!(
                    "deltas[{k}] strength has wrong shape"
                )));
            }
            ensure_hermitian(&d.strength).map_err(|_| {
                GceError::InvalidProfile(format!("deltas[{k}] strength is not Hermitian"))
            })?;
            match edges.iter().find(|e| (**e - d.x0).abs() <= POSITION_TOL) {
                Some(e) => d.x0 = *e,
                None => {
                    return Err(GceError::InvalidProfile(format!(
                        "deltas[{k}] at x0 = {} is not on a segment boundary",
                        d.x0
                    )))
                }
            }
        }
        if let Some(w) = deltas.windows(2).find(|w| w[0].x0 == w[1].x0) {
            return Err(GceError::InvalidProfile(format!(
                "two deltas share position {}",
                w[0].x0
            )));
        }
        Ok(Self {
            n_systems,
            segments,
            deltas,
        })
    }

    /// Diagonal profile from `(x_lo, x_hi, [V_1..V_N])` segments and `(x0, [λ_1..λ_N])` deltas.
    pub fn diagonal(segments: &[(f64, f64, Vec<f64>)], deltas: &[(f64, Vec<f64>)]) -> Result<Self> {
        let n = segments.first().map_or(0, |s| s.2.len());
        let segs = segments
            .iter()
            .map(|(lo, hi, v)| Segment {
                x_lo: *lo,
                x_hi: *hi,
                v: real_diag(v),
            })
            .collect();
        let ds = deltas
            .iter()
            .map(|(x0, s)| Delta {
                x0: *x0,
                strength: real_diag(s),
            })
            .collect();
        Self::new(n, segs, ds)
    }

    /// Single-system profile from `(x_lo, x_hi, V)` segments and `(x0, λ)` deltas.
    pub fn single(segments: &[(f64, f64, f64)], deltas: &[(f64, f64)]) -> Result<Self> {
        let segs: Vec<_> = segments.iter().map(|(a, b, v)| (*a, *b, vec![*v])).collect();
        let ds: Vec<_> = deltas.iter().map(|(x, l)| (*x, vec![*l])).collect();
        Self::diagonal(&segs, &ds)
    }

    /// Diagonal N-system profile assembled from single-system profiles.
    pub fn stack(systems: &[PotentialProfile]) -> Result<Self> {
        if systems.is_empty() {
            return Err(GceError::EmptyProfile);
        }
        if let Some(p) = systems.iter().find(|p| p.n_systems != 1) {
            return Err(GceError::InvalidProfile(format!(
                "stack expects single-system profiles, got one with {} systems",
                p.n_systems
            )));
        }
        let edges = merge_positions(systems.iter().flat_map(|p| p.edges()));
        let n = systems.len();
        let segments = edges
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let diag: Vec<f64> = systems
                    .iter()
                    .map(|p| p.value_at(mid, Side::Right)[(0, 0)].re)
                    .collect();
                Segment {
                    x_lo: w[0],
                    x_hi: w[1],
                    v: real_diag(&diag),
                }
            })
            .collect();
        let positions = merge_positions(systems.iter().flat_map(|p| p.deltas.iter().map(|d| d.x0)));
        let deltas = positions
            .into_iter()
            .map(|x0| {
                let diag: Vec<f64> = systems
                    .iter()
                    .map(|p| p.delta_at(x0).map_or(0.0, |s| s[(0, 0)].re))
                    .collect();
                Delta {
                    x0,
                    strength: real_diag(&diag),
                }
            })
            .collect();
        Self::new(n, segments, deltas)
    }

    /// Single-system profile of system `i`; fails when `i` couples to other systems.
    pub fn restrict(&self, i: usize) -> Result<Self> {
        if i >= self.n_systems {
            return Err(GceError::IndexOutOfRange {
                index: i,
                len: self.n_systems,
            });
        }
        let coupled = |m: &CMatrix| (0..self.n_systems).any(|k| k != i && m[(i, k)].norm() > 0.0);
        if self.segments.iter().any(|s| coupled(&s.v)) || self.deltas.iter().any(|d| coupled(&d.strength)) {
            return Err(GceError::InvalidProfile(format!(
                "system {i} is coupled to other systems"
            )));
        }
        let pick = |m: &CMatrix| CMatrix::from_element(1, 1, m[(i, i)]);
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                x_lo: s.x_lo,
                x_hi: s.x_hi,
                v: pick(&s.v),
            })
            .collect();
        let deltas = self
            .deltas
            .iter()
            .filter(|d| d.strength[(i, i)].norm() > 0.0)
            .map(|d| Delta {
                x0: d.x0,
                strength: pick(&d.strength),
            })
            .collect();
        Self::new(1, segments, deltas)
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn deltas(&self) -> &[Delta] {
        &self.deltas
    }

    pub fn span(&self) -> (f64, f64) {
        (self.segments[0].x_lo, self.segments[self.segments.len() - 1].x_hi)
    }

    /// Segment boundaries, `segments.len() + 1` entries.
    pub fn edges(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.segments.iter().map(|s| s.x_lo).collect();
        e.push(self.span().1);
        e
    }

    pub fn segment_index(&self, x: f64, side: Side) -> usize {
        locate(&self.edges(), x, side)
    }

    /// Potential matrix at `x`, extended beyond the span by the outer segments.
    pub fn value_at(&self, x: f64, side: Side) -> &CMatrix {
        &self.segments[self.segment_index(x, side)].v
    }

    pub fn delta_at(&self, x: f64) -> Option<&CMatrix> {
        self.deltas
            .iter()
            .find(|d| (d.x0 - x).abs() <= POSITION_TOL)
            .map(|d| &d.strength)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.segments.iter().all(|s| is_diagonal(&s.v, tol))
            && self.deltas.iter().all(|d| is_diagonal(&d.strength, tol))
    }

    pub fn potential_field(&self) -> PiecewiseMatrix {
        PiecewiseMatrix::new(self.edges(), self.segments.iter().map(|s| s.v.clone()).collect())
            .expect("validated profile")
    }

    /// Same profile with every nonzero diagonal delta entry set to `lambda`.
    pub fn with_delta_strength(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for d in &mut out.deltas {
            for i in 0..self.n_systems {
                if d.strength[(i, i)].norm() > 0.0 {
                    d.strength[(i, i)] = c(lambda, 0.0);
                }
            }
        }
        out
    }
}

/// Sorted positions with near-duplicates merged.
pub(crate) fn merge_positions(xs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = xs.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| (*b - *a).abs() <= POSITION_TOL);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_segments_named() {
        let err = PotentialProfile::single(&[(0.0, 2.0, 0.0), (1.0, 3.0, 1.0)], &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("segments[0]") && msg.contains("segments[1]"), "{msg}");
    }

    #[test]
    fn delta_must_sit_on_boundary() {
        assert!(PotentialProfile::single(&[(0.0, 2.0, 0.0)], &[(1.0, 0.5)]).is_err());
        assert!(PotentialProfile::single(&[(0.0, 1.0, 0.0), (1.0, 2.0, 0.0)], &[(1.0, 0.5)]).is_ok());
    }

    #[test]
    fn empty_profile() {
        assert!(matches!(
            PotentialProfile::new(1, vec![], vec![]),
            Err(GceError::EmptyProfile)
        ));
    }

    #[test]
    fn stack_merges_breakpoints() {
        let a = PotentialProfile::single(&[(-1.0, 0.0, 0.5), (0.0, 1.0, 0.0)], &[(0.0, 0.3)]).unwrap();
        let b = PotentialProfile::single(&[(-2.0, 0.5, 0.2)], &[]).unwrap();
        let s = PotentialProfile::stack(&[a.clone(), b]).unwrap();
        assert_eq!(s.edges(), vec![-2.0, -1.0, 0.0, 0.5, 1.0]);
        assert_eq!(s.value_at(-1.5, Side::Right)[(0, 0)].re, 0.5);
        assert_eq!(s.value_at(0.7, Side::Right)[(1, 1)].re, 0.2);
        assert_eq!(s.delta_at(0.0).unwrap()[(0, 0)].re, 0.3);
        let back = s.restrict(0).unwrap();
        assert_eq!(back.value_at(-0.5, Side::Right)[(0, 0)].re, 0.5);
        assert_eq!(back.deltas().len(), 1);
    }

    #[test]
    fn restrict_rejects_coupled() {
        let mut v = real_diag(&[0.0, 0.0]);
        v[(0, 1)] = c(0.1, 0.0);
        v[(1, 0)] = c(0.1, 0.0);
        let p = PotentialProfile::new(2, vec![Segment { x_lo: 0.0, x_hi: 1.0, v }], vec![]).unwrap();
        assert!(p.restrict(0).is_err());
        assert!(!p.is_diagonal(0.0));
    }
}
