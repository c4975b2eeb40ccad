//! Exact stationary solutions of the 1-D Dirac and Schrödinger equations over
//! piecewise-constant potentials with delta barriers.
//!
//! Both equations are written as first-order systems `y'(x) = M y(x)` with two
//! components per system (Dirac spinor, or value/derivative), so a constant segment
//! of length `L` is crossed exactly by `exp(M L)` and a delta barrier by a junction
//! matrix. Natural units, ħ = c = 1.

mod convention;
mod dirac;
mod piecewise;
mod schrodinger;

pub use convention::{Convention, Coupling};
pub use dirac::{delta_junction, dirac_generator, solve_dirac, SpinorSolution};
pub use piecewise::{BoundarySpec, SampledField, ScatteringData};
pub use schrodinger::{schrodinger_generator, schrodinger_junction, solve_schrodinger, WaveSolution};

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::Side;

/// A stationary state `e^{-iEt} φ(x)` of an N-system problem, viewed per system.
///
/// Each system contributes two components: the Dirac spinor, or `(φ, φ')` for
/// Schrödinger states.
pub trait Stationary {
    fn n_systems(&self) -> usize;
    fn energy(&self) -> f64;
    fn system_value(&self, system: usize, x: f64, side: Side) -> Result<[Complex64; 2]>;
    /// Positions where the field or the potential may be non-smooth.
    fn breakpoints(&self) -> Vec<f64>;
}
