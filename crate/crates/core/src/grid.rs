use serde::{Deserialize, Serialize};

use crate::error::{GceError, Result};

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Ordered sample positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

/// Relative tolerance for treating a grid as uniform.
const UNIFORM_TOL: f64 = 1e-9;

impl Grid {
    /// `n_points` equally spaced samples on `[x_min, x_max]`, endpoints included.
    pub fn uniform(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(GceError::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 2 {
            return Err(GceError::InvalidGrid(format!(
                "need at least 2 points, got {n_points}"
            )));
        }
        let h = (x_max - x_min) / (n_points - 1) as f64;
        let mut points: Vec<f64> = (0..n_points).map(|k| x_min + k as f64 * h).collect();
        points[n_points - 1] = x_max;
        Ok(Self { points })
    }

    /// Arbitrary strictly increasing positions.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(GceError::InvalidGrid("empty grid".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(GceError::InvalidGrid("non-finite position".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GceError::InvalidGrid("positions must increase strictly".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.points[0]
    }

    pub fn x_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Common spacing, or an error when the grid is not uniform.
    pub fn spacing(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(GceError::InvalidGrid("spacing needs two points".into()));
        }
        let h = (self.x_max() - self.x_min()) / (self.points.len() - 1) as f64;
        let worst = self
            .points
            .windows(2)
            .map(|w| ((w[1] - w[0]) - h).abs())
            .fold(0.0, f64::max);
        if worst > UNIFORM_TOL * h {
            return Err(GceError::NonUniformGrid(worst));
        }
        Ok(h)
    }

    /// Uniform grid with half the spacing; every old point is kept.
    pub fn refined(&self) -> Result<Self> {
        self.spacing()?;
        Grid::uniform(self.x_min(), self.x_max(), 2 * self.points.len() - 1)
    }
}

/// Serializable description of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::uniform(self.x_min, self.x_max, self.n_points)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points.max(2) - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_endpoints_exact() {
        let g = Grid::uniform(-1.0, 2.0, 7).unwrap();
        assert_eq!(g.x_min(), -1.0);
        assert_eq!(g.x_max(), 2.0);
        assert!((g.spacing().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn refined_keeps_points() {
        let g = Grid::uniform(0.0, 1.0, 5).unwrap();
        let r = g.refined().unwrap();
        assert_eq!(r.len(), 9);
        for (k, x) in g.points().iter().enumerate() {
            assert!((r.points()[2 * k] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn non_uniform_rejected() {
        let g = Grid::from_points(vec![0.0, 0.1, 0.3]).unwrap();
        assert!(matches!(g.spacing(), Err(GceError::NonUniformGrid(_))));
    }

    #[test]
    fn invalid_grids() {
        assert!(Grid::uniform(1.0, 1.0, 10).is_err());
        assert!(Grid::uniform(0.0, 1.0, 1).is_err());
        assert!(Grid::from_points(vec![0.0, 0.0]).is_err());
    }
}
