//! SU(N) generators, structure constants and potential decomposition.

mod basis;
mod decompose;

pub use basis::{build_basis, structure_constants, GeneratorKind, StructureConstants, SunBasis};
pub use decompose::{decompose, decompose_matrix, source_operator, PotentialDecomposition};
