//! Generalized continuity equations (GCEs) for N Dirac or Schrödinger systems
//! coupled through an SU(N) transformation of the stacked field.
//!
//! The crate builds SU(N) generator bases and decomposes potential matrices into
//! them, solves the 1-D stationary problems exactly over piecewise-constant
//! potentials with delta barriers, and evaluates the generalized currents, their
//! source terms and GCE residuals, together with symmetry-domain detection.

pub mod algebra;
pub mod error;
pub mod field;
pub mod gce;
pub mod grid;
pub mod linalg;
pub mod profile;
pub mod scenario;
pub mod solvers;

pub use algebra::{
    build_basis, decompose, decompose_matrix, source_operator, structure_constants,
    GeneratorKind, PotentialDecomposition, StructureConstants, SunBasis,
};
pub use error::{GceError, Result};
pub use field::PiecewiseMatrix;
pub use gce::{
    detect_domains, CurrentProfile, DiracStack, Domain, GceReport, Target, TransformSpec,
    WaveStack,
};
pub use grid::{Grid, GridSpec, Side};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use profile::{Delta, PotentialProfile, Segment};
pub use scenario::{load_scenario, run_scenario, write_reports, ReportBundle, RunOptions, Scenario};
pub use solvers::{
    BoundarySpec, Convention, Coupling, SampledField, ScatteringData, SpinorSolution,
    WaveSolution,
};
