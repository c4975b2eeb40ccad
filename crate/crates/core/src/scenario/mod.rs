//! Scenario files: loading, validation, canonical serialization, built-ins, running
//! and report writing.
//!
//! A scenario is a TOML document whose keys match the [`Scenario`] field names. See
//! `scenarios/*.toml` in this crate for complete examples.

mod builtin;
mod report;
mod run;
mod schema;

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GceError, Result};
use crate::gce::TransformSpec;
use crate::grid::GridSpec;
use crate::linalg::{c, is_diagonal, CMatrix};
use crate::profile::{Delta, PotentialProfile, Segment};
use crate::solvers::{BoundarySpec, Convention, Coupling};

pub use builtin::{builtin_names, builtin_scenario, builtin_source};
pub use report::{write_reports, Table, TableCell};
pub use run::{
    run_scenario, scan_scenario, solve_report, solve_scenario, ChargeSummary, DeltaSummary,
    DomainSummary, GridSummary, ReportBundle, ResidualSummary, RunOptions, ScanStep,
    ScatteringSummary, Solved, Summary, Verdict,
};

use schema::{RawBoundary, RawConvention, RawDelta, RawProfile, RawScenario, RawSegment, RawTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dirac,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Currents,
    Residuals,
    Domains,
    ChargeRelation,
    DeltaRelation,
}

/// Symmetry map `x -> sigma·x + rho` relating system 1 to system 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    pub sigma: i8,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionChoice {
    pub name: String,
    pub coupling: Coupling,
}

/// A validated description of one computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub model: Model,
    pub n_systems: usize,
    pub profile: PotentialProfile,
    pub energies: Vec<f64>,
    pub boundaries: Vec<BoundarySpec>,
    /// Dirac only; `None` means the default convention.
    pub convention: Option<ConventionChoice>,
    /// Schrödinger only; `None` means mass 1.
    pub mass: Option<f64>,
    pub transform: Option<TransformParams>,
    pub grid: GridSpec,
    pub requested_outputs: Vec<OutputKind>,
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GceError::io(path, e))?;
    Scenario::from_toml_str(&text, &path.display().to_string())
}

fn schema_error(origin: &str, key: &str, message: impl Into<String>) -> GceError {
    GceError::Schema {
        origin: origin.into(),
        key: key.into(),
        message: message.into(),
    }
}

fn invariant(origin: &str, rule: &str, message: impl Into<String>) -> GceError {
    GceError::Invariant {
        origin: origin.into(),
        rule: rule.into(),
        message: message.into(),
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(offset, |p| offset - p - 1) + 1;
    (line, col)
}

/// Key named by a deserialization error: the backticked field of an unknown or
/// missing key, else the key on the offending line.
fn error_key(message: &str, text: &str, offset: Option<usize>) -> String {
    if message.starts_with("unknown field") || message.starts_with("missing field") {
        if let Some(field) = message.split('`').nth(1).filter(|f| !f.is_empty()) {
            return field.to_string();
        }
    }
    if let Some(off) = offset {
        let start = text[..off.min(text.len())].rfind('\n').map_or(0, |p| p + 1);
        let line = text[start..].lines().next().unwrap_or("");
        if let Some((key, _)) = line.split_once('=') {
            return key.trim().to_string();
        }
        if let Some(header) = line.trim().strip_prefix('[') {
            return header.trim_matches(|ch| ch == '[' || ch == ']').trim().to_string();
        }
    }
    "<root>".into()
}

fn convert_toml_error(e: toml::de::Error, text: &str, origin: &str) -> GceError {
    let message = e.message().to_string();
    let offset = e.span().map(|s| s.start);
    let schema_like = ["missing field", "unknown field", "unknown variant", "invalid type", "invalid length", "invalid value"]
        .iter()
        .any(|p| message.contains(p));
    if schema_like {
        return schema_error(origin, &error_key(&message, text, offset), message);
    }
    let (line, column) = offset.map_or((1, 1), |o| line_col(text, o));
    GceError::Parse {
        origin: origin.into(),
        line,
        column,
        message,
    }
}

fn complex_matrix(
    origin: &str,
    key: &str,
    n: usize,
    re: &[Vec<f64>],
    im: Option<&Vec<Vec<f64>>>,
) -> Result<CMatrix> {
    let shape_ok = |m: &[Vec<f64>]| m.len() == n && m.iter().all(|r| r.len() == n);
    if !shape_ok(re) {
        return Err(schema_error(origin, key, format!("expected a {n}x{n} matrix")));
    }
    if let Some(im) = im {
        if !shape_ok(im) {
            return Err(schema_error(origin, key, format!("imaginary part must be {n}x{n}")));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        c(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

fn diag_matrix(origin: &str, key: &str, n: usize, d: &[f64]) -> Result<CMatrix> {
    if d.len() != n {
        return Err(schema_error(origin, key, format!("expected {n} diagonal entries, got {}", d.len())));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| if i == j { c(d[i], 0.0) } else { c(0.0, 0.0) }))
}

fn matrix_from_raw(
    origin: &str,
    key: &str,
    n: usize,
    diag: Option<&Vec<f64>>,
    full: Option<&Vec<Vec<f64>>>,
    imag: Option<&Vec<Vec<f64>>>,
    full_name: &str,
) -> Result<CMatrix> {
    match (diag, full) {
        (Some(d), None) if imag.is_none() => diag_matrix(origin, &format!("{key}.diag"), n, d),
        (Some(_), None) => Err(schema_error(origin, key, format!("imaginary part given without `{full_name}`"))),
        (None, Some(m)) => complex_matrix(origin, &format!("{key}.{full_name}"), n, m, imag),
        (Some(_), Some(_)) => Err(schema_error(origin, key, format!("give either `diag` or `{full_name}`, not both"))),
        (None, None) => Err(schema_error(origin, key, format!("missing `diag` or `{full_name}`"))),
    }
}

/// Splits a matrix into the raw `diag` or `(full, imag)` layout.
type RawMatrix = (Option<Vec<f64>>, Option<Vec<Vec<f64>>>, Option<Vec<Vec<f64>>>);

fn matrix_to_raw(m: &CMatrix) -> RawMatrix {
    let n = m.nrows();
    let real = m.iter().all(|z| z.im == 0.0);
    if real && is_diagonal(m, 0.0) {
        return (Some((0..n).map(|i| m[(i, i)].re).collect()), None, None);
    }
    let rows = |f: fn(&Complex64) -> f64| (0..n).map(|i| (0..n).map(|j| f(&m[(i, j)])).collect()).collect();
    let im = if real { None } else { Some(rows(|z| z.im)) };
    (None, Some(rows(|z| z.re)), im)
}

fn complex_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Scenario {
    /// Parses and validates TOML text; `origin` names the source in errors.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| convert_toml_error(e, text, origin))?;
        Self::from_raw(raw, origin)
    }

    fn from_raw(raw: RawScenario, origin: &str) -> Result<Self> {
        let n = raw.n_systems;
        if n < 2 {
            return Err(invariant(origin, "n_systems >= 2", format!("n_systems = {n}")));
        }
        let mut segments = Vec::with_capacity(raw.profile.segments.len());
        for (k, s) in raw.profile.segments.iter().enumerate() {
            let key = format!("profile.segments[{k}]");
            let v = matrix_from_raw(origin, &key, n, s.diag.as_ref(), s.v.as_ref(), s.v_im.as_ref(), "v")?;
            segments.push(Segment { x_lo: s.x_lo, x_hi: s.x_hi, v });
        }
        let mut deltas = Vec::with_capacity(raw.profile.deltas.len());
        for (k, d) in raw.profile.deltas.iter().enumerate() {
            let key = format!("profile.deltas[{k}]");
            let strength = matrix_from_raw(
                origin,
                &key,
                n,
                d.diag.as_ref(),
                d.strength.as_ref(),
                d.strength_im.as_ref(),
                "strength",
            )?;
            deltas.push(Delta { x0: d.x0, strength });
        }
        let profile = PotentialProfile::new(n, segments, deltas).map_err(|e| {
            let msg = e.to_string();
            let key = if msg.contains("deltas") { "profile.deltas" } else { "profile.segments" };
            schema_error(origin, key, msg)
        })?;
        let boundaries = raw
            .boundaries
            .iter()
            .map(|b| match b {
                RawBoundary::Scattering { incoming } => BoundarySpec::Scattering {
                    incoming: vec![c(incoming[0], incoming[1])],
                },
                RawBoundary::Initial { value } => {
                    BoundarySpec::InitialValue(value.iter().map(|z| c(z[0], z[1])).collect())
                }
            })
            .collect();
        let scenario = Scenario {
            name: raw.name,
            model: raw.model,
            n_systems: n,
            profile,
            energies: raw.energies,
            boundaries,
            convention: raw.convention.map(|cv| ConventionChoice {
                name: cv.name,
                coupling: cv.coupling,
            }),
            mass: raw.mass,
            transform: raw.transform.map(|t| TransformParams { sigma: t.sigma, rho: t.rho }),
            grid: raw.grid,
            requested_outputs: raw.requested_outputs,
        };
        scenario.validate_in(origin)?;
        Ok(scenario)
    }

    /// Checks every invariant; `load_scenario` guarantees these already hold.
    pub fn validate(&self) -> Result<()> {
        self.validate_in(&format!("scenario `{}`", self.name))
    }

    fn validate_in(&self, origin: &str) -> Result<()> {
        let n = self.n_systems;
        let g = &self.grid;
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_min < g.x_max) {
            return Err(invariant(origin, "x_min < x_max", format!("grid is [{}, {}]", g.x_min, g.x_max)));
        }
        if g.n_points < 3 {
            return Err(invariant(origin, "n_points >= 3", format!("grid has {} points", g.n_points)));
        }
        if self.profile.n_systems() != n {
            return Err(invariant(
                origin,
                "profile size = n_systems",
                format!("profile has {} systems, n_systems = {n}", self.profile.n_systems()),
            ));
        }
        if self.energies.len() != n {
            return Err(invariant(
                origin,
                "energies length = n_systems",
                format!("{} energies for {n} systems", self.energies.len()),
            ));
        }
        if let Some(e) = self.energies.iter().find(|e| !e.is_finite()) {
            return Err(invariant(origin, "finite energies", format!("energy {e}")));
        }
        if self.boundaries.len() != n {
            return Err(invariant(
                origin,
                "boundaries length = n_systems",
                format!("{} boundaries for {n} systems", self.boundaries.len()),
            ));
        }
        for (k, b) in self.boundaries.iter().enumerate() {
            let ok = match b {
                BoundarySpec::Scattering { incoming } => incoming.len() == 1,
                BoundarySpec::InitialValue(v) => v.len() == 2,
            };
            if !ok {
                return Err(invariant(
                    origin,
                    "one boundary per system",
                    format!("boundaries[{k}] has the wrong number of components"),
                ));
            }
        }
        match self.model {
            Model::Dirac => {
                if self.mass.is_some() {
                    return Err(invariant(origin, "mass is schrodinger-only", "dirac scenarios take no mass"));
                }
                if let Some(cv) = &self.convention {
                    Convention::named(&cv.name, cv.coupling)
                        .map_err(|e| schema_error(origin, "convention.name", e.to_string()))?;
                }
            }
            Model::Schrodinger => {
                if self.convention.is_some() {
                    return Err(invariant(
                        origin,
                        "convention is dirac-only",
                        "schrodinger scenarios take no convention",
                    ));
                }
                if let Some(m) = self.mass {
                    if !(m.is_finite() && m > 0.0) {
                        return Err(invariant(origin, "mass > 0", format!("mass {m}")));
                    }
                }
            }
        }
        if !self.profile.is_diagonal(0.0) {
            let e0 = self.energies[0];
            if self.energies.iter().any(|e| *e != e0) {
                return Err(invariant(
                    origin,
                    "coupled systems share one energy",
                    "a non-diagonal profile is solved jointly and needs equal energies",
                ));
            }
            let scattering = matches!(self.boundaries[0], BoundarySpec::Scattering { .. });
            if self
                .boundaries
                .iter()
                .any(|b| matches!(b, BoundarySpec::Scattering { .. }) != scattering)
            {
                return Err(invariant(
                    origin,
                    "coupled systems share one boundary kind",
                    "a non-diagonal profile needs all-scattering or all-initial boundaries",
                ));
            }
        }
        if let Some(t) = &self.transform {
            if t.sigma != 1 && t.sigma != -1 {
                return Err(invariant(origin, "sigma = ±1", format!("sigma = {}", t.sigma)));
            }
            if !t.rho.is_finite() {
                return Err(invariant(origin, "finite rho", format!("rho = {}", t.rho)));
            }
        }
        let pair_output = |kind: OutputKind| self.requested_outputs.contains(&kind);
        let needs_pair = self.transform.is_some()
            || pair_output(OutputKind::ChargeRelation)
            || pair_output(OutputKind::DeltaRelation);
        if needs_pair && !(self.model == Model::Dirac && n == 2 && self.profile.is_diagonal(0.0)) {
            return Err(invariant(
                origin,
                "two uncoupled dirac systems",
                "transforms, charge_relation and delta_relation need a diagonal two-system dirac scenario",
            ));
        }
        if pair_output(OutputKind::DeltaRelation) && self.transform.is_none() {
            return Err(invariant(origin, "delta_relation needs a transform", "add a [transform] table"));
        }
        Ok(())
    }

    /// Built-in scenario by name.
    pub fn builtin(name: &str) -> Result<Self> {
        builtin_scenario(name)
    }

    /// Canonical TOML form; loading it yields an equal scenario.
    pub fn to_toml(&self) -> Result<String> {
        let segments = self
            .profile
            .segments()
            .iter()
            .map(|s| {
                let (diag, v, v_im) = matrix_to_raw(&s.v);
                RawSegment {
                    x_lo: s.x_lo,
                    x_hi: s.x_hi,
                    diag,
                    v,
                    v_im,
                }
            })
            .collect();
        let deltas = self
            .profile
            .deltas()
            .iter()
            .map(|d| {
                let (diag, strength, strength_im) = matrix_to_raw(&d.strength);
                RawDelta {
                    x0: d.x0,
                    diag,
                    strength,
                    strength_im,
                }
            })
            .collect();
        let boundaries = self
            .boundaries
            .iter()
            .map(|b| match b {
                BoundarySpec::Scattering { incoming } => RawBoundary::Scattering {
                    incoming: complex_pair(&incoming[0]),
                },
                BoundarySpec::InitialValue(v) => RawBoundary::Initial {
                    value: [complex_pair(&v[0]), complex_pair(&v[1])],
                },
            })
            .collect();
        let raw = RawScenario {
            name: self.name.clone(),
            model: self.model,
            n_systems: self.n_systems,
            energies: self.energies.clone(),
            mass: self.mass,
            requested_outputs: self.requested_outputs.clone(),
            convention: self.convention.as_ref().map(|cv| RawConvention {
                name: cv.name.clone(),
                coupling: cv.coupling,
            }),
            grid: self.grid,
            transform: self.transform.map(|t| RawTransform { sigma: t.sigma, rho: t.rho }),
            profile: RawProfile { segments, deltas },
            boundaries,
        };
        toml::to_string(&raw).map_err(|e| GceError::InvalidArgument(format!("cannot serialize scenario: {e}")))
    }

    /// The Dirac convention in effect (default when unset).
    pub fn resolved_convention(&self) -> Result<Convention> {
        match &self.convention {
            Some(cv) => Convention::named(&cv.name, cv.coupling),
            None => Ok(Convention::default()),
        }
    }

    /// The Schrödinger mass in effect (1 when unset).
    pub fn resolved_mass(&self) -> f64 {
        self.mass.unwrap_or(1.0)
    }

    /// Transform with the spinor factor of the resolved convention.
    pub fn transform_spec(&self) -> Result<Option<TransformSpec>> {
        match &self.transform {
            None => Ok(None),
            Some(t) => Ok(Some(TransformSpec::new(t.sigma, t.rho, &self.resolved_convention()?)?)),
        }
    }

    /// Replaces the strength of every nonzero diagonal delta entry.
    pub fn set_delta_strength(&mut self, lambda: f64) {
        self.profile = self.profile.with_delta_strength(lambda);
    }

    /// Keeps the grid extent and changes the number of points.
    pub fn set_grid_points(&mut self, n_points: usize) {
        self.grid.n_points = n_points;
    }

    /// Sets the Dirac convention by name, keeping the coupling.
    pub fn set_convention(&mut self, name: &str) -> Result<()> {
        if self.model != Model::Dirac {
            return Err(GceError::InvalidArgument(
                "only dirac scenarios take a convention".into(),
            ));
        }
        let coupling = self.convention.as_ref().map_or(Coupling::default(), |cv| cv.coupling);
        Convention::named(name, coupling)?;
        self.convention = Some(ConventionChoice {
            name: name.into(),
            coupling,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "free"
model = "dirac"
n_systems = 2
energies = [1.0, 1.0]

[grid]
x_min = -1.0
x_max = 1.0
n_points = 11

[[profile.segments]]
x_lo = -1.0
x_hi = 1.0
diag = [0.0, 0.0]

[[boundaries]]
kind = "scattering"
incoming = [1.0, 0.0]

[[boundaries]]
kind = "scattering"
incoming = [0.0, 1.0]
"#;

    #[test]
    fn minimal_file_loads() {
        let s = Scenario::from_toml_str(MINIMAL, "test").unwrap();
        assert_eq!(s.n_systems, 2);
        assert!(s.profile.segments().iter().all(|seg| seg.v.iter().all(|z| z.norm() == 0.0)));
        assert!(s.requested_outputs.is_empty());
    }

    #[test]
    fn round_trip_is_exact() {
        let s = Scenario::from_toml_str(MINIMAL, "test").unwrap();
        let back = Scenario::from_toml_str(&s.to_toml().unwrap(), "again").unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn syntax_error_has_position() {
        let text = MINIMAL.replace("n_systems = 2", "n_systems = = 2");
        match Scenario::from_toml_str(&text, "t") {
            Err(GceError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("n_systems = 2", "n_systems = 2\ncolour = 3");
        match Scenario::from_toml_str(&text, "t") {
            Err(GceError::Schema { key, .. }) => assert_eq!(key, "colour"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn energy_count_is_an_invariant() {
        let text = MINIMAL.replace("energies = [1.0, 1.0]", "energies = [1.0]");
        match Scenario::from_toml_str(&text, "t") {
            Err(GceError::Invariant { rule, .. }) => assert_eq!(rule, "energies length = n_systems"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
