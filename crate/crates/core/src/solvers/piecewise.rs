//! Exact propagation of `y' = M y` through piecewise-constant generators.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GceError, Result};
use crate::grid::{Grid, Side};
use crate::linalg::{expm, CMatrix, CVector, ZERO};
use crate::profile::{PotentialProfile, POSITION_TOL};

/// Boundary data fixing a stationary solution.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    /// Full state vector (2 components per system) just left of the first segment edge.
    InitialValue(Vec<Complex64>),
    /// Plane waves with amplitude `incoming[i]` arriving from -∞ in
    /// system `i`; nothing arrives from +∞.
    Scattering { incoming: Vec<Complex64> },
}

/// Per-system plane-wave amplitudes of a scattering solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringData {
    pub incoming: Vec<Complex64>,
    pub reflected: Vec<Complex64>,
    pub transmitted: Vec<Complex64>,
    /// Probability flux carried by a unit-amplitude mode of each kind, per system.
    pub incoming_flux: Vec<f64>,
    pub reflected_flux: Vec<f64>,
    pub transmitted_flux: Vec<f64>,
}

impl ScatteringData {
    fn total(amps: &[Complex64], flux: &[f64]) -> f64 {
        amps.iter().zip(flux).map(|(a, f)| a.norm_sqr() * f.abs()).sum()
    }

    /// Reflected over incident probability flux.
    pub fn reflectance(&self) -> f64 {
        Self::total(&self.reflected, &self.reflected_flux)
            / Self::total(&self.incoming, &self.incoming_flux)
    }

    /// Transmitted over incident probability flux.
    pub fn transmittance(&self) -> f64 {
        Self::total(&self.transmitted, &self.transmitted_flux)
            / Self::total(&self.incoming, &self.incoming_flux)
    }
}

/// State vectors sampled on a grid: right limits everywhere, plus left limits where a
/// grid point sits on a discontinuity.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    pub positions: Vec<f64>,
    pub values: Vec<CVector>,
    pub left_limits: Vec<Option<CVector>>,
}

impl SampledField {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Value at sample `k` from the given side.
    pub fn value(&self, k: usize, side: Side) -> &CVector {
        match side {
            Side::Left => self.left_limits[k].as_ref().unwrap_or(&self.values[k]),
            Side::Right => &self.values[k],
        }
    }
}

/// Equation-specific pieces used by the propagation engine.
pub(crate) trait Model {
    /// Generator of `y' = M y` for an N×N potential.
    fn generator(&self, v: &CMatrix) -> CMatrix;
    /// Matrix mapping `y(x0⁻)` to `y(x0⁺)` across a delta of the given strength.
    fn junction(&self, strength: &CMatrix) -> CMatrix;
    /// Plane-wave modes of one uncoupled system in a constant potential.
    fn modes(&self, v: f64) -> Result<ModePair>;
}

/// Mode `u e^{μx}` with its probability flux.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mode {
    pub vector: [Complex64; 2],
    pub exponent: Complex64,
    pub flux: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ModePair {
    pub right: Mode,
    pub left: Mode,
}

/// Splits the two eigenmodes of a 2×2 generator into right- and left-movers.
///
/// `flux` gives the probability flux of a mode vector.
pub(crate) fn classify_modes(
    g: &CMatrix,
    flux: impl Fn(&[Complex64; 2]) -> f64,
) -> Result<ModePair> {
    let (a, b, cc, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let mean = (a + d) * 0.5;
    let disc = (((a - d) * 0.5).powi(2) + b * cc).sqrt();
    let scale = 1.0 + mean.norm() + disc.norm();
    let roots = [mean + disc, mean - disc];
    if disc.norm() <= 1e-12 * scale || roots.iter().any(|m| m.re.abs() > 1e-10 * scale) {
        return Err(GceError::Evanescent(format!(
            "asymptotic exponents {} and {} are not distinct and purely imaginary",
            roots[0], roots[1]
        )));
    }
    let modes: Vec<Mode> = roots
        .iter()
        .map(|&mu| {
            let mu = Complex64::new(0.0, mu.im);
            let c1 = [b, mu - a];
            let c2 = [mu - d, cc];
            let norm = |v: &[Complex64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            let v = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
            let n = norm(&v);
            let pivot = if v[0].norm() > 1e-8 * n { v[0] } else { v[1] };
            let phase = pivot.conj() / pivot.norm();
            let vector = [v[0] * phase / n, v[1] * phase / n];
            Mode {
                vector,
                exponent: mu,
                flux: flux(&vector),
            }
        })
        .collect();
    let (m0, m1) = (modes[0], modes[1]);
    if m0.flux * m1.flux >= 0.0 {
        return Err(GceError::Evanescent(format!(
            "asymptotic modes carry fluxes {} and {} of equal sign",
            m0.flux, m1.flux
        )));
    }
    Ok(if m0.flux > 0.0 {
        ModePair { right: m0, left: m1 }
    } else {
        ModePair { right: m1, left: m0 }
    })
}

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    anchor: f64,
    generator: CMatrix,
    value: CVector,
}

/// Solution of `y' = M(x) y` on the whole real line.
///
/// Pieces: the left asymptotic region up to the first edge, one piece per segment
/// (anchored at its lower edge, after any delta there), and the right asymptotic
/// region from the last edge (after any delta there).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PiecewiseField {
    edges: Vec<f64>,
    pieces: Vec<Piece>,
    deltas: Vec<f64>,
}

impl PiecewiseField {
    /// Propagates `left_value = y(x_start⁻)` across the profile.
    pub fn build(profile: &PotentialProfile, model: &dyn Model, left_value: CVector) -> Self {
        let edges = profile.edges();
        let segs = profile.segments();
        let junction_at = |x: f64| profile.delta_at(x).map(|s| model.junction(s));
        let mut pieces = Vec::with_capacity(segs.len() + 2);
        pieces.push(Piece {
            anchor: edges[0],
            generator: model.generator(&segs[0].v),
            value: left_value.clone(),
        });
        let mut y = left_value;
        for (k, seg) in segs.iter().enumerate() {
            if let Some(j) = junction_at(edges[k]) {
                y = j * y;
            }
            let g = model.generator(&seg.v);
            let next = expm(&(&g * Complex64::from(seg.x_hi - seg.x_lo))) * &y;
            pieces.push(Piece {
                anchor: seg.x_lo,
                generator: g,
                value: y,
            });
            y = next;
        }
        let last = edges[edges.len() - 1];
        if let Some(j) = junction_at(last) {
            y = j * y;
        }
        pieces.push(Piece {
            anchor: last,
            generator: model.generator(&segs[segs.len() - 1].v),
            value: y,
        });
        let deltas = profile.deltas().iter().map(|d| d.x0).collect();
        Self {
            edges,
            pieces,
            deltas,
        }
    }

    /// Matrix mapping `y(x_start⁻)` to `y(x_end⁺)`.
    pub fn transfer(profile: &PotentialProfile, model: &dyn Model) -> CMatrix {
        let edges = profile.edges();
        let dim = 2 * profile.n_systems();
        let mut t = CMatrix::identity(dim, dim);
        for (k, seg) in profile.segments().iter().enumerate() {
            if let Some(s) = profile.delta_at(edges[k]) {
                t = model.junction(s) * t;
            }
            let g = model.generator(&seg.v);
            t = expm(&(g * Complex64::from(seg.x_hi - seg.x_lo))) * t;
        }
        if let Some(s) = profile.delta_at(edges[edges.len() - 1]) {
            t = model.junction(s) * t;
        }
        t
    }

    pub fn value(&self, x: f64, side: Side) -> Result<CVector> {
        if !x.is_finite() {
            return Err(GceError::OutsideDomain(x));
        }
        let p = match side {
            Side::Right => self.edges.partition_point(|&e| e <= x),
            Side::Left => self.edges.partition_point(|&e| e < x),
        };
        let piece = &self.pieces[p];
        let dx = x - piece.anchor;
        if dx == 0.0 {
            return Ok(piece.value.clone());
        }
        Ok(expm(&(&piece.generator * Complex64::from(dx))) * &piece.value)
    }

    /// Segment edges and delta positions.
    pub fn breakpoints(&self) -> Vec<f64> {
        crate::profile::merge_positions(self.edges.iter().chain(&self.deltas).copied())
    }

    /// Samples on `grid`, recording left limits at deltas that fall on grid points.
    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        let positions = grid.points().to_vec();
        let mut values = Vec::with_capacity(positions.len());
        let mut left_limits = Vec::with_capacity(positions.len());
        for &x in &positions {
            values.push(self.value(x, Side::Right)?);
            let on_delta = self.deltas.iter().any(|d| (d - x).abs() <= POSITION_TOL);
            left_limits.push(if on_delta {
                Some(self.value(x, Side::Left)?)
            } else {
                None
            });
        }
        Ok(SampledField {
            positions,
            values,
            left_limits,
        })
    }
}

/// Resolves boundary data into `y(x_start⁻)`, solving the scattering problem if needed.
pub(crate) fn initial_state(
    profile: &PotentialProfile,
    model: &dyn Model,
    boundary: &BoundarySpec,
) -> Result<(CVector, Option<ScatteringData>)> {
    let n = profile.n_systems();
    match boundary {
        BoundarySpec::InitialValue(v) => {
            if v.len() != 2 * n {
                return Err(GceError::InvalidBoundary(format!(
                    "initial value needs {} components, got {}",
                    2 * n,
                    v.len()
                )));
            }
            Ok((CVector::from_column_slice(v), None))
        }
        BoundarySpec::Scattering { incoming } => {
            if incoming.len() != n {
                return Err(GceError::InvalidBoundary(format!(
                    "scattering needs {n} incoming amplitudes, got {}",
                    incoming.len()
                )));
            }
            if incoming.iter().all(|a| a.norm() == 0.0) {
                return Err(GceError::InvalidBoundary("all incoming amplitudes vanish".into()));
            }
            let (data, left) = solve_scattering(profile, model, incoming)?;
            Ok((left, Some(data)))
        }
    }
}

fn solve_scattering(
    profile: &PotentialProfile,
    model: &dyn Model,
    incoming: &[Complex64],
) -> Result<(ScatteringData, CVector)> {
    let n = profile.n_systems();
    let segs = profile.segments();
    let (first, last) = (&segs[0].v, &segs[segs.len() - 1].v);
    if !crate::linalg::is_diagonal(first, 0.0) || !crate::linalg::is_diagonal(last, 0.0) {
        return Err(GceError::InvalidBoundary(
            "scattering needs uncoupled asymptotic potentials".into(),
        ));
    }
    let (x_start, x_end) = profile.span();
    let mut left_modes = Vec::with_capacity(n);
    let mut right_modes = Vec::with_capacity(n);
    for i in 0..n {
        left_modes.push(model.modes(first[(i, i)].re)?);
        right_modes.push(model.modes(last[(i, i)].re)?);
    }
    let embed = |i: usize, m: &Mode, x: f64| {
        let mut v = CVector::from_element(2 * n, ZERO);
        let ph = (m.exponent * x).exp();
        v[2 * i] = m.vector[0] * ph;
        v[2 * i + 1] = m.vector[1] * ph;
        v
    };
    let t = PiecewiseField::transfer(profile, model);
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    let mut rhs = CVector::from_element(2 * n, ZERO);
    let mut incident = CVector::from_element(2 * n, ZERO);
    for i in 0..n {
        a.set_column(i, &(&t * embed(i, &left_modes[i].left, x_start)));
        a.set_column(n + i, &(-embed(i, &right_modes[i].right, x_end)));
        incident += embed(i, &left_modes[i].right, x_start) * incoming[i];
    }
    rhs -= &t * &incident;
    let z = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| GceError::Singular("scattering matching matrix".into()))?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(GceError::Singular("scattering matching matrix".into()));
    }
    let reflected: Vec<Complex64> = z.iter().take(n).copied().collect();
    let transmitted: Vec<Complex64> = z.iter().skip(n).copied().collect();
    let mut left = incident;
    for (i, r) in reflected.iter().enumerate() {
        left += embed(i, &left_modes[i].left, x_start) * *r;
    }
    let data = ScatteringData {
        incoming: incoming.to_vec(),
        reflected,
        transmitted,
        incoming_flux: left_modes.iter().map(|m| m.right.flux).collect(),
        reflected_flux: left_modes.iter().map(|m| m.left.flux).collect(),
        transmitted_flux: right_modes.iter().map(|m| m.right.flux).collect(),
    };
    Ok((data, left))
}
