//! On-disk TOML layout of a scenario. Keys mirror the [`Scenario`](super::Scenario)
//! field names.

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::solvers::Coupling;

use super::{Model, OutputKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawScenario {
    #[serde(default)]
    pub name: String,
    pub model: Model,
    pub n_systems: usize,
    pub energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default)]
    pub requested_outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<RawConvention>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<RawTransform>,
    pub profile: RawProfile,
    pub boundaries: Vec<RawBoundary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawConvention {
    #[serde(default = "default_convention_name")]
    pub name: String,
    #[serde(default)]
    pub coupling: Coupling,
}

fn default_convention_name() -> String {
    "default".into()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawTransform {
    pub sigma: i8,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawProfile {
    pub segments: Vec<RawSegment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub deltas: Vec<RawDelta>,
}

/// A segment gives either `diag` (real diagonal) or the full matrix `v` (+ `v_im`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawSegment {
    pub x_lo: f64,
    pub x_hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct RawDelta {
    pub x0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength_im: Option<Vec<Vec<f64>>>,
}

/// Complex numbers are written as `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub(super) enum RawBoundary {
    Scattering { incoming: [f64; 2] },
    Initial { value: [[f64; 2]; 2] },
}
