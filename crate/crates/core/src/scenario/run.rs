//! Executes a scenario and collects its tables and verdicts.

use num_complex::Complex64;
use serde::Serialize;

use super::report::{Table, TableCell};
use super::{Model, OutputKind, Scenario};
use crate::algebra::{build_basis, decompose, PotentialDecomposition, SunBasis};
use crate::error::{GceError, Result};
use crate::gce::{
    charge_current_relation, delta_domain_relation, detect_domains, dirac_current,
    dirac_pair_current, gce_residual_dirac, gce_residual_schrodinger, relative_variation,
    schrodinger_current, schrodinger_pair_current, transformed_current, CurrentProfile,
    DiracStack, Domain, GceReport, Target, TransformSpec, WaveStack,
};
use crate::grid::{Grid, Side};
use crate::linalg::CMatrix;
use crate::solvers::{
    delta_junction, solve_dirac, solve_schrodinger, BoundarySpec, ScatteringData, SpinorSolution,
    WaveSolution,
};

/// Potentials closer than this count as equal when detecting domains.
const DOMAIN_TOL: f64 = 1e-12;
/// Simpson intervals for the charge relation.
const CHARGE_INTERVALS: usize = 10_000;
const CHARGE_TOL: f64 = 1e-6;
/// Minimum relative variation of a current outside its conservation domains.
const LOCALITY_MIN: f64 = 0.1;
const ORDER_TARGET: f64 = 2.0;
const ORDER_TOL: f64 = 0.2;
/// Residual norms below this multiple of max(scale, 1) are treated as exact zeros.
const ROUNDOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Relative tolerance for domain constancy and the delta relation.
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { tol: 1e-8 }
    }
}

/// Stationary states of a scenario: one single-system state per system when the
/// profile is diagonal, otherwise one joint state.
#[derive(Debug, Clone)]
pub enum Solved {
    Dirac {
        states: Vec<SpinorSolution>,
        stack: DiracStack,
    },
    Schrodinger {
        states: Vec<WaveSolution>,
        stack: WaveStack,
    },
}

impl Solved {
    fn values_at(&self, x: f64) -> Result<Vec<[Complex64; 2]>> {
        match self {
            Solved::Dirac { stack, .. } => stack.values_at(x, Side::Right),
            Solved::Schrodinger { stack, .. } => stack.values_at(x, Side::Right),
        }
    }

    fn scattering(&self) -> Vec<Option<&ScatteringData>> {
        match self {
            Solved::Dirac { states, .. } => states.iter().map(|s| s.scattering()).collect(),
            Solved::Schrodinger { states, .. } => states.iter().map(|s| s.scattering()).collect(),
        }
    }

    fn dirac_states(&self) -> Result<&[SpinorSolution]> {
        match self {
            Solved::Dirac { states, .. } => Ok(states),
            Solved::Schrodinger { .. } => Err(GceError::InvalidArgument(
                "this output needs a dirac scenario".into(),
            )),
        }
    }
}

fn joint_boundary(boundaries: &[BoundarySpec]) -> BoundarySpec {
    if let BoundarySpec::Scattering { .. } = boundaries[0] {
        let incoming = boundaries
            .iter()
            .flat_map(|b| match b {
                BoundarySpec::Scattering { incoming } => incoming.clone(),
                BoundarySpec::InitialValue(_) => Vec::new(),
            })
            .collect();
        BoundarySpec::Scattering { incoming }
    } else {
        BoundarySpec::InitialValue(
            boundaries
                .iter()
                .flat_map(|b| match b {
                    BoundarySpec::InitialValue(v) => v.clone(),
                    BoundarySpec::Scattering { .. } => Vec::new(),
                })
                .collect(),
        )
    }
}

/// Solves every system of the scenario.
pub fn solve_scenario(s: &Scenario) -> Result<Solved> {
    s.validate()?;
    let diagonal = s.profile.is_diagonal(0.0);
    match s.model {
        Model::Dirac => {
            let conv = s.resolved_convention()?;
            let states = if diagonal {
                (0..s.n_systems)
                    .map(|i| solve_dirac(&s.profile.restrict(i)?, s.energies[i], &s.boundaries[i], &conv))
                    .collect::<Result<Vec<_>>>()?
            } else {
                vec![solve_dirac(&s.profile, s.energies[0], &joint_boundary(&s.boundaries), &conv)?]
            };
            let stack = if diagonal {
                DiracStack::from_systems(&states)?
            } else {
                DiracStack::joint(&states[0])
            };
            Ok(Solved::Dirac { states, stack })
        }
        Model::Schrodinger => {
            let mass = s.resolved_mass();
            let states = if diagonal {
                (0..s.n_systems)
                    .map(|i| solve_schrodinger(&s.profile.restrict(i)?, s.energies[i], &s.boundaries[i], mass))
                    .collect::<Result<Vec<_>>>()?
            } else {
                vec![solve_schrodinger(&s.profile, s.energies[0], &joint_boundary(&s.boundaries), mass)?]
            };
            let stack = if diagonal {
                WaveStack::from_systems(&states)?
            } else {
                WaveStack::joint(&states[0])
            };
            Ok(Solved::Schrodinger { states, stack })
        }
    }
}

/// One pass/fail check. `rule` is `"max"` when `value` must not exceed `limit` and
/// `"min"` when it must reach it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub rule: &'static str,
    pub pass: bool,
}

impl Verdict {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            rule: "max",
            pass: value <= limit,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            rule: "min",
            pass: value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSummary {
    /// One-based system label.
    pub system: usize,
    pub reflectance: f64,
    pub transmittance: f64,
}

/// Domain bounds use `null` for an unbounded side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSummary {
    pub pair: [usize; 2],
    pub sigma: i8,
    pub rho: f64,
    pub x_lo: Option<f64>,
    pub x_hi: Option<f64>,
    pub n_samples: usize,
    pub mean: Complex64,
    pub max_deviation: f64,
    /// `None` when constancy is not expected (different energies) or not measurable.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub target: String,
    pub spacing: f64,
    pub norm: f64,
    pub scale: f64,
    pub relative: f64,
    pub order: Option<f64>,
    /// True when the residual is at roundoff level, so no order is meaningful.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargeSummary {
    pub x1: f64,
    pub x2: f64,
    pub n_intervals: usize,
    pub q: Complex64,
    pub boundary_value: Complex64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSummary {
    pub x0: f64,
    pub c_minus: Complex64,
    pub c_plus: Complex64,
    pub predicted_c_plus: Complex64,
    pub deviation: f64,
    pub constancy_minus: f64,
    pub constancy_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanStep {
    pub h_coarse: f64,
    pub h_fine: f64,
    pub target: String,
    pub order: Option<f64>,
}

/// Machine-readable result of a run; written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub tool_version: String,
    pub model: Model,
    pub n_systems: usize,
    pub energies: Vec<f64>,
    pub convention: Option<String>,
    pub mass: Option<f64>,
    pub grid: GridSummary,
    pub tolerance: f64,
    pub outputs: Vec<OutputKind>,
    pub scattering: Vec<ScatteringSummary>,
    pub domains: Vec<DomainSummary>,
    pub residuals: Vec<ResidualSummary>,
    pub charge_relation: Option<ChargeSummary>,
    pub delta_relations: Vec<DeltaSummary>,
    pub scan: Vec<ScanStep>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub scenario: Scenario,
    pub tables: Vec<Table>,
    pub summary: Summary,
}

impl ReportBundle {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(&self.summary)
            .map_err(|e| GceError::InvalidArgument(format!("cannot serialize summary: {e}")))?;
        text.push('\n');
        Ok(text)
    }
}

fn target_label(t: Target) -> String {
    match t {
        Target::Generator(a) => format!("generator_{}", a + 1),
        Target::Pair(i, j) => format!("pair_{}_{}", i + 1, j + 1),
    }
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn current_table(name: String, cur: &CurrentProfile) -> Table {
    let mut t = Table::new(name, &["x", "re_j1", "im_j1", "re_j0", "im_j0"]);
    for k in 0..cur.grid.len() {
        t.push(vec![
            cur.grid[k].into(),
            cur.j1[k].re.into(),
            cur.j1[k].im.into(),
            cur.j0[k].re.into(),
            cur.j0[k].im.into(),
        ]);
    }
    t
}

fn residual_table(report: &GceReport) -> Table {
    let mut t = Table::new(
        format!("residual_{}", target_label(report.target)),
        &["x", "re_residual", "im_residual"],
    );
    for (x, r) in report.grid.iter().zip(&report.residual) {
        t.push(vec![(*x).into(), r.re.into(), r.im.into()]);
    }
    t
}

struct Context<'a> {
    scenario: &'a Scenario,
    solved: Solved,
    basis: SunBasis,
    decomp: PotentialDecomposition,
    grid: Grid,
    opts: RunOptions,
    tables: Vec<Table>,
    summary: Summary,
}

impl<'a> Context<'a> {
    fn new(s: &'a Scenario, opts: &RunOptions) -> Result<Self> {
        s.validate()?;
        if !(opts.tol > 0.0) {
            return Err(GceError::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
        }
        let grid = s.grid.build()?;
        let solved = solve_scenario(s)?;
        let basis = build_basis(s.n_systems)?;
        let decomp = decompose(&s.profile.potential_field(), &basis)?;
        let convention = match s.model {
            Model::Dirac => {
                let conv = s.resolved_convention()?;
                Some(format!("{}/{}", conv.name(), conv.coupling().as_str()))
            }
            Model::Schrodinger => None,
        };
        let scattering = solved
            .scattering()
            .iter()
            .enumerate()
            .filter_map(|(i, d)| {
                d.map(|d| ScatteringSummary {
                    system: i + 1,
                    reflectance: d.reflectance(),
                    transmittance: d.transmittance(),
                })
            })
            .collect();
        let summary = Summary {
            scenario: s.name.clone(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            model: s.model,
            n_systems: s.n_systems,
            energies: s.energies.clone(),
            convention,
            mass: (s.model == Model::Schrodinger).then(|| s.resolved_mass()),
            grid: GridSummary {
                x_min: s.grid.x_min,
                x_max: s.grid.x_max,
                n_points: s.grid.n_points,
                spacing: s.grid.spacing(),
            },
            tolerance: opts.tol,
            outputs: s.requested_outputs.clone(),
            scattering,
            domains: Vec::new(),
            residuals: Vec::new(),
            charge_relation: None,
            delta_relations: Vec::new(),
            scan: Vec::new(),
            verdicts: Vec::new(),
            passed: true,
        };
        Ok(Self {
            scenario: s,
            solved,
            basis,
            decomp,
            grid,
            opts: *opts,
            tables: Vec::new(),
            summary,
        })
    }

    fn finish(mut self) -> ReportBundle {
        self.summary.passed = self.summary.verdicts.iter().all(|v| v.pass);
        ReportBundle {
            scenario: self.scenario.clone(),
            tables: self.tables,
            summary: self.summary,
        }
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.scenario.n_systems;
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    fn targets(&self) -> Vec<Target> {
        (0..self.basis.dim())
            .map(Target::Generator)
            .chain(self.pairs().into_iter().map(|(i, j)| Target::Pair(i, j)))
            .collect()
    }

    fn generator_current(&self, a: usize, grid: &Grid) -> Result<CurrentProfile> {
        match &self.solved {
            Solved::Dirac { stack, .. } => dirac_current(stack, a, &self.basis, grid),
            Solved::Schrodinger { stack, .. } => {
                schrodinger_current(stack, a, &self.basis, grid, self.scenario.resolved_mass())
            }
        }
    }

    fn pair_current(&self, (i, j): (usize, usize), grid: &Grid) -> Result<CurrentProfile> {
        match &self.solved {
            Solved::Dirac { stack, .. } => dirac_pair_current(stack, i, j, grid),
            Solved::Schrodinger { stack, .. } => {
                schrodinger_pair_current(stack, i, j, grid, self.scenario.resolved_mass())
            }
        }
    }

    fn transformed(&self, spec: &TransformSpec, domains: &[Domain]) -> Result<CurrentProfile> {
        let states = self.solved.dirac_states()?;
        transformed_current(&states[0], &states[1], spec, &self.grid, domains)
    }

    fn residual(&self, target: Target, grid: &Grid) -> Result<GceReport> {
        match &self.solved {
            Solved::Dirac { stack, .. } => gce_residual_dirac(stack, &self.basis, target, grid, &self.decomp),
            Solved::Schrodinger { stack, .. } => gce_residual_schrodinger(
                stack,
                &self.basis,
                target,
                grid,
                &self.decomp,
                self.scenario.resolved_mass(),
            ),
        }
    }

    fn solution(&mut self) -> Result<()> {
        let n = self.scenario.n_systems;
        let comps: [&str; 2] = match self.scenario.model {
            Model::Dirac => ["psi1_", "psi2_"],
            Model::Schrodinger => ["phi_", "dphi_"],
        };
        let mut header = vec!["x".to_string()];
        for i in 1..=n {
            for comp in comps {
                header.push(format!("re_{comp}{i}"));
                header.push(format!("im_{comp}{i}"));
            }
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = Table::new("solution", &header_refs);
        for &x in self.grid.points() {
            let mut row: Vec<TableCell> = vec![x.into()];
            for u in self.solved.values_at(x)? {
                for z in u {
                    row.push(z.re.into());
                    row.push(z.im.into());
                }
            }
            t.push(row);
        }
        self.tables.push(t);
        Ok(())
    }

    fn currents(&mut self) -> Result<()> {
        for a in 0..self.basis.dim() {
            let cur = self.generator_current(a, &self.grid)?;
            self.tables.push(current_table(format!("current_generator_{}", a + 1), &cur));
        }
        for (i, j) in self.pairs() {
            let cur = self.pair_current((i, j), &self.grid)?;
            self.tables
                .push(current_table(format!("current_pair_{}_{}", i + 1, j + 1), &cur));
        }
        if let Some(spec) = self.scenario.transform_spec()? {
            let cur = self.transformed(&spec, &[])?;
            self.tables.push(current_table("current_transformed".into(), &cur));
        }
        Ok(())
    }

    fn record_domains(
        &mut self,
        table: &mut Table,
        pair: (usize, usize),
        spec: &TransformSpec,
        cur: &CurrentProfile,
        domains: &[Domain],
    ) {
        let (i, j) = pair;
        let judged = self.scenario.energies[i] == self.scenario.energies[j];
        for d in domains {
            let stat = cur.stat(d);
            let pass = (judged && stat.n_samples > 0).then(|| stat.max_deviation <= self.opts.tol);
            let name = format!(
                "domain_constancy_{}_{}_sigma{}_({}, {})",
                i + 1,
                j + 1,
                spec.sigma(),
                d.x_lo,
                d.x_hi
            );
            if pass.is_some() {
                self.summary
                    .verdicts
                    .push(Verdict::at_most(name, stat.max_deviation, self.opts.tol));
            }
            let verdict = match pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "n/a",
            };
            table.push(vec![
                (i + 1).into(),
                (j + 1).into(),
                TableCell::Int(spec.sigma() as i64),
                spec.rho().into(),
                d.x_lo.into(),
                d.x_hi.into(),
                stat.n_samples.into(),
                stat.mean.re.into(),
                stat.mean.im.into(),
                stat.max_deviation.into(),
                verdict.into(),
            ]);
            self.summary.domains.push(DomainSummary {
                pair: [i + 1, j + 1],
                sigma: spec.sigma(),
                rho: spec.rho(),
                x_lo: finite_or_none(d.x_lo),
                x_hi: finite_or_none(d.x_hi),
                n_samples: stat.n_samples,
                mean: stat.mean,
                max_deviation: stat.max_deviation,
                pass,
            });
        }
        // A current that is constant inside its domains should still vary outside.
        if judged && !domains.is_empty() {
            let outside = cur.outside(domains);
            if outside.len() >= 3 {
                if let Some((_, variation)) = relative_variation(&outside) {
                    self.summary.verdicts.push(Verdict::at_least(
                        format!("locality_{}_{}_sigma{}", i + 1, j + 1, spec.sigma()),
                        variation,
                        LOCALITY_MIN,
                    ));
                }
            }
        }
    }

    fn domains(&mut self) -> Result<()> {
        let mut table = Table::new(
            "domains",
            &[
                "pair_i",
                "pair_j",
                "sigma",
                "rho",
                "x_lo",
                "x_hi",
                "n_samples",
                "re_mean",
                "im_mean",
                "max_deviation",
                "verdict",
            ],
        );
        let identity = TransformSpec::identity();
        for pair in self.pairs() {
            let domains = detect_domains(&self.scenario.profile, pair, &identity, DOMAIN_TOL)?;
            let cur = self.pair_current(pair, &self.grid)?;
            self.record_domains(&mut table, pair, &identity, &cur, &domains);
        }
        if let Some(spec) = self.scenario.transform_spec()? {
            let domains = detect_domains(&self.scenario.profile, (0, 1), &spec, DOMAIN_TOL)?;
            let cur = self.transformed(&spec, &[])?;
            self.record_domains(&mut table, (0, 1), &spec, &cur, &domains);
        }
        self.tables.push(table);
        Ok(())
    }

    fn residual_summary(&self, coarse: &GceReport, fine: Option<&GceReport>) -> ResidualSummary {
        let exact = coarse.residual_norm <= ROUNDOFF * coarse.scale.max(1.0);
        let order = fine.map(|f| coarse.clone().with_convergence(f).convergence_order.unwrap_or(f64::NAN));
        ResidualSummary {
            target: target_label(coarse.target),
            spacing: coarse.spacing,
            norm: coarse.residual_norm,
            scale: coarse.scale,
            relative: coarse.relative_residual(),
            order: if exact { None } else { order },
            exact,
        }
    }

    fn residuals(&mut self) -> Result<()> {
        let fine_grid = self.grid.refined()?;
        for target in self.targets() {
            let coarse = self.residual(target, &self.grid)?;
            let fine = self.residual(target, &fine_grid)?;
            let rs = self.residual_summary(&coarse, Some(&fine));
            if !rs.exact {
                let order = rs.order.unwrap_or(f64::NAN);
                self.summary.verdicts.push(Verdict::at_most(
                    format!("residual_order_{}", rs.target),
                    (order - ORDER_TARGET).abs(),
                    ORDER_TOL,
                ));
            }
            self.tables.push(residual_table(&coarse));
            self.summary.residuals.push(rs);
        }
        Ok(())
    }

    fn charge_relation(&mut self) -> Result<()> {
        let states = self.solved.dirac_states()?;
        let (x1, x2) = (self.grid.x_min(), self.grid.x_max());
        let r = charge_current_relation(&states[0], &states[1], x1, x2, CHARGE_INTERVALS)?;
        let mut t = Table::new(
            "charge_relation",
            &["x1", "x2", "n_intervals", "re_q", "im_q", "re_boundary", "im_boundary", "discrepancy"],
        );
        t.push(vec![
            x1.into(),
            x2.into(),
            CHARGE_INTERVALS.into(),
            r.q.re.into(),
            r.q.im.into(),
            r.boundary_value.re.into(),
            r.boundary_value.im.into(),
            r.discrepancy.into(),
        ]);
        self.tables.push(t);
        self.summary
            .verdicts
            .push(Verdict::at_most("charge_relation", r.discrepancy, CHARGE_TOL));
        self.summary.charge_relation = Some(ChargeSummary {
            x1,
            x2,
            n_intervals: CHARGE_INTERVALS,
            q: r.q,
            boundary_value: r.boundary_value,
            discrepancy: r.discrepancy,
        });
        Ok(())
    }

    fn delta_relation(&mut self) -> Result<()> {
        let spec = self
            .scenario
            .transform_spec()?
            .ok_or_else(|| GceError::InvalidArgument("delta_relation needs a transform".into()))?;
        let conv = self.scenario.resolved_convention()?;
        let detected = detect_domains(&self.scenario.profile, (0, 1), &spec, DOMAIN_TOL)?;
        let barriers: Vec<(f64, Complex64)> = self
            .scenario
            .profile
            .deltas()
            .iter()
            .filter(|d| d.strength[(1, 1)].norm() == 0.0)
            .map(|d| (d.x0, d.strength[(0, 0)]))
            .collect();
        let mut t = Table::new(
            "delta_relation",
            &[
                "x0",
                "re_c_minus",
                "im_c_minus",
                "re_c_plus",
                "im_c_plus",
                "re_predicted_c_plus",
                "im_predicted_c_plus",
                "deviation",
                "constancy_minus",
                "constancy_plus",
            ],
        );
        let states = self.solved.dirac_states()?.to_vec();
        for (x0, strength) in barriers {
            // A barrier that matches its image leaves one domain across x0; split it.
            let mut domains = detected.clone();
            if let Some(k) = domains.iter().position(|d| d.contains(x0)) {
                let d = domains.remove(k);
                domains.insert(k, Domain::new(x0, d.x_hi, spec.clone())?);
                domains.insert(k, Domain::new(d.x_lo, x0, spec.clone())?);
            }
            let junction = delta_junction(&CMatrix::from_element(1, 1, strength), &conv)?;
            let r = delta_domain_relation(&states[0], &states[1], &junction, &spec, x0, &self.grid, &domains)?;
            let scale = r.c_plus.norm().max(1.0);
            let v = &mut self.summary.verdicts;
            v.push(Verdict::at_most(format!("delta_constancy_minus_{x0}"), r.constancy_minus, self.opts.tol));
            v.push(Verdict::at_most(format!("delta_constancy_plus_{x0}"), r.constancy_plus, self.opts.tol));
            v.push(Verdict::at_most(format!("delta_relation_{x0}"), r.deviation / scale, self.opts.tol));
            t.push(vec![
                x0.into(),
                r.c_minus.re.into(),
                r.c_minus.im.into(),
                r.c_plus.re.into(),
                r.c_plus.im.into(),
                r.predicted_c_plus.re.into(),
                r.predicted_c_plus.im.into(),
                r.deviation.into(),
                r.constancy_minus.into(),
                r.constancy_plus.into(),
            ]);
            self.summary.delta_relations.push(DeltaSummary {
                x0,
                c_minus: r.c_minus,
                c_plus: r.c_plus,
                predicted_c_plus: r.predicted_c_plus,
                deviation: r.deviation,
                constancy_minus: r.constancy_minus,
                constancy_plus: r.constancy_plus,
            });
        }
        self.tables.push(t);
        Ok(())
    }
}

fn in_context<T>(s: &Scenario, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        GceError::InScenario { .. } => e,
        other => GceError::InScenario {
            scenario: s.name.clone(),
            source: Box::new(other),
        },
    })
}

/// Computes every requested output. Verdict failures are recorded in the summary, not
/// returned as errors.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<ReportBundle> {
    in_context(s, run_inner(s, opts))
}

fn run_inner(s: &Scenario, opts: &RunOptions) -> Result<ReportBundle> {
    let mut cx = Context::new(s, opts)?;
    for kind in &s.requested_outputs {
        match kind {
            OutputKind::Currents => cx.currents()?,
            OutputKind::Residuals => cx.residuals()?,
            OutputKind::Domains => cx.domains()?,
            OutputKind::ChargeRelation => cx.charge_relation()?,
            OutputKind::DeltaRelation => cx.delta_relation()?,
        }
    }
    Ok(cx.finish())
}

/// Solver stage only: the sampled states plus scattering coefficients.
pub fn solve_report(s: &Scenario, opts: &RunOptions) -> Result<ReportBundle> {
    in_context(s, {
        Context::new(s, opts).and_then(|mut cx| {
            cx.summary.outputs.clear();
            cx.solution()?;
            Ok(cx.finish())
        })
    })
}

/// Residual norms at each spacing in `spacings` and the observed order between
/// consecutive spacings. Every spacing must divide the grid extent.
pub fn scan_scenario(s: &Scenario, spacings: &[f64], opts: &RunOptions) -> Result<ReportBundle> {
    in_context(s, scan_inner(s, spacings, opts))
}

fn scan_inner(s: &Scenario, spacings: &[f64], opts: &RunOptions) -> Result<ReportBundle> {
    if spacings.len() < 2 {
        return Err(GceError::InvalidArgument("a scan needs at least two spacings".into()));
    }
    let length = s.grid.x_max - s.grid.x_min;
    let mut grids = Vec::with_capacity(spacings.len());
    for &h in spacings {
        if !(h > 0.0 && h.is_finite()) {
            return Err(GceError::InvalidArgument(format!("spacing {h} must be positive")));
        }
        let cells = (length / h).round();
        if cells < 2.0 || ((cells * h) - length).abs() > 1e-9 * length {
            return Err(GceError::InvalidArgument(format!(
                "spacing {h} does not divide the grid extent {length}"
            )));
        }
        grids.push(Grid::uniform(s.grid.x_min, s.grid.x_max, cells as usize + 1)?);
    }
    let mut cx = Context::new(s, opts)?;
    cx.summary.outputs = vec![OutputKind::Residuals];
    let targets = cx.targets();
    let mut header = vec!["h".to_string()];
    header.extend(targets.iter().map(|t| format!("norm_{}", target_label(*t))));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut norms_table = Table::new("scan", &header_refs);
    let mut reports: Vec<Vec<GceReport>> = Vec::with_capacity(grids.len());
    for (h, grid) in spacings.iter().zip(&grids) {
        let row_reports = targets
            .iter()
            .map(|t| cx.residual(*t, grid))
            .collect::<Result<Vec<_>>>()?;
        let mut row: Vec<TableCell> = vec![(*h).into()];
        row.extend(row_reports.iter().map(|r| TableCell::Float(r.residual_norm)));
        norms_table.push(row);
        reports.push(row_reports);
    }
    let mut order_header = vec!["h_coarse".to_string(), "h_fine".to_string()];
    order_header.extend(targets.iter().map(|t| format!("order_{}", target_label(*t))));
    let order_refs: Vec<&str> = order_header.iter().map(String::as_str).collect();
    let mut order_table = Table::new("scan_order", &order_refs);
    for k in 0..grids.len() - 1 {
        let (hc, hf) = (spacings[k], spacings[k + 1]);
        let mut row: Vec<TableCell> = vec![hc.into(), hf.into()];
        for (t_idx, target) in targets.iter().enumerate() {
            let coarse = &reports[k][t_idx];
            let fine = &reports[k + 1][t_idx];
            let exact = coarse.residual_norm <= ROUNDOFF * coarse.scale.max(1.0);
            let order = (coarse.residual_norm / fine.residual_norm).ln() / (hc / hf).ln();
            row.push(if exact { TableCell::Text("exact".into()) } else { order.into() });
            let label = target_label(*target);
            if !exact {
                cx.summary.verdicts.push(Verdict::at_most(
                    format!("scan_order_{label}_{hc}_{hf}"),
                    (order - ORDER_TARGET).abs(),
                    ORDER_TOL,
                ));
            }
            cx.summary.scan.push(ScanStep {
                h_coarse: hc,
                h_fine: hf,
                target: label,
                order: (!exact).then_some(order),
            });
        }
        order_table.push(row);
    }
    for row_reports in &reports {
        for r in row_reports {
            let rs = cx.residual_summary(r, None);
            cx.summary.residuals.push(rs);
        }
    }
    cx.tables.push(norms_table);
    cx.tables.push(order_table);
    Ok(cx.finish())
}
