//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Runs without the libtest harness so the report stays one line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use common::{c, d1, d2, interior_points, max_dev};
use gce_core::gce::{
    charge_current_relation, dirac_pair_current, gauge_residual, gce_convergence_dirac,
    gce_convergence_schrodinger, gce_residual_dirac, transformed_current, GaugeConfig,
    SpacetimeGrid, SpinorField,
};
use gce_core::linalg::{commutator, hermitian_deviation, max_abs, real_diag, trace};
use gce_core::scenario::{builtin_names, builtin_scenario, ConventionChoice, RunOptions};
use gce_core::solvers::{solve_dirac, solve_schrodinger, Stationary};
use gce_core::{
    build_basis, decompose, decompose_matrix, detect_domains, run_scenario, BoundarySpec, CMatrix,
    Complex64, Convention, Coupling, DiracStack, GceError, Grid, PotentialProfile, Scenario, Side,
    SpinorSolution, SunBasis, Target, TransformSpec, WaveStack,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Fails with `what = value > limit` unless `value <= limit`.
fn at_most(what: &str, value: f64, limit: f64) -> Result<(), String> {
    if value <= limit {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} > {limit:.0e}"))
    }
}

fn at_least(what: &str, value: f64, limit: f64) -> Result<(), String> {
    if value >= limit {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} < {limit}"))
    }
}

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn incoming() -> BoundarySpec {
    BoundarySpec::Scattering { incoming: vec![c(1.0, 0.0)] }
}

fn dirac_states(profile: &PotentialProfile, energies: &[f64], conv: &Convention) -> Result<Vec<SpinorSolution>, String> {
    (0..profile.n_systems())
        .map(|i| ok(solve_dirac(&ok(profile.restrict(i))?, energies[i], &incoming(), conv)))
        .collect()
}

fn unequal_profile() -> Result<PotentialProfile, String> {
    ok(PotentialProfile::diagonal(
        &[(-3.0, -1.0, vec![0.2, 0.0]), (-1.0, 1.0, vec![0.7, -0.4]), (1.0, 3.0, vec![0.0, 0.3])],
        &[],
    ))
}

fn levi_civita(a: usize, b: usize, k: usize) -> f64 {
    match (a, b, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

fn criterion_1() -> Outcome {
    let (mut herm, mut orth, mut anti, mut closure, mut jacobi) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for n in 2..=5 {
        let basis = ok(build_basis(n))?;
        let d = basis.dim();
        let gens = basis.generators();
        for (a, ta) in gens.iter().enumerate() {
            herm = herm.max(hermitian_deviation(ta)).max(trace(ta).norm());
            for (b, tb) in gens.iter().enumerate() {
                let expect = if a == b { 0.5 } else { 0.0 };
                orth = orth.max((trace(&(ta * tb)) - c(expect, 0.0)).norm());
                let mut rhs = CMatrix::zeros(n, n);
                for (k, t) in gens.iter().enumerate() {
                    rhs += t * c(0.0, basis.f(a, b, k));
                    anti = anti
                        .max((basis.f(a, b, k) + basis.f(b, a, k)).abs())
                        .max((basis.f(a, b, k) + basis.f(a, k, b)).abs());
                }
                closure = closure.max(max_abs(&(commutator(ta, tb) - rhs)));
            }
        }
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    for e in 0..d {
                        let j: f64 = (0..d)
                            .map(|m| {
                                basis.f(a, b, m) * basis.f(m, k, e)
                                    + basis.f(b, k, m) * basis.f(m, a, e)
                                    + basis.f(k, a, m) * basis.f(m, b, e)
                            })
                            .sum();
                        jacobi = jacobi.max(j.abs());
                    }
                }
            }
        }
    }
    let su2 = ok(build_basis(2))?;
    let mut eps = 0f64;
    for a in 0..3 {
        for b in 0..3 {
            for k in 0..3 {
                eps = eps.max((su2.f(a, b, k) - levi_civita(a, b, k)).abs());
            }
        }
    }
    at_most("hermitian/traceless", herm, 1e-14)?;
    at_most("orthonormality", orth, 1e-14)?;
    at_most("antisymmetry", anti, 1e-13)?;
    at_most("closure", closure, 1e-13)?;
    at_most("jacobi", jacobi, 1e-12)?;
    at_most("su2 f - eps", eps, 1e-14)?;
    Ok(format!("N=2..5 closure {closure:.1e}, jacobi {jacobi:.1e}, su2 eps {eps:.1e}"))
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = c(rng.gen_range(-5.0..5.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn reconstruct(basis: &SunBasis, v0: f64, coeffs: &[f64]) -> CMatrix {
    let n = basis.rank();
    let mut m = CMatrix::identity(n, n) * c(v0, 0.0);
    for (t, ck) in basis.generators().iter().zip(coeffs) {
        m += t * c(*ck, 0.0);
    }
    m
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0f64;
    for n in 2..=4 {
        let basis = ok(build_basis(n))?;
        for _ in 0..100 {
            let v = random_hermitian(n, &mut rng);
            let (v0, cs) = ok(decompose_matrix(&v, &basis))?;
            worst = worst.max(max_abs(&(reconstruct(&basis, v0, &cs) - &v)));
        }
    }
    let basis = ok(build_basis(3))?;
    let mut closed = 0f64;
    for _ in 0..100 {
        let diag = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let (_, cs) = ok(decompose_matrix(&real_diag(&diag), &basis))?;
        closed = closed
            .max((cs[2] - (diag[0] - diag[1])).abs())
            .max((cs[7] - (diag[0] + diag[1] - 2.0 * diag[2]) / 3f64.sqrt()).abs());
    }
    at_most("round trip", worst, 1e-12)?;
    at_most("cartan closed forms", closed, 1e-13)?;
    Ok(format!("round trip {worst:.1e}, C_3/C_8 {closed:.1e}"))
}

fn barrier_with_delta() -> Result<PotentialProfile, String> {
    ok(PotentialProfile::single(
        &[(-2.0, -1.0, 0.2), (-1.0, 0.0, 0.8), (0.0, 1.5, -0.3), (1.5, 3.0, 0.1)],
        &[(0.0, 0.7)],
    ))
}

/// `iγ¹ψ' + Eγ⁰ψ − V K ψ` with γ⁰ = diag(1, −1) and iγ¹ = [[0, −1], [−1, 0]] written out.
fn dirac_ode_residual(psi: &dyn Fn(f64) -> [Complex64; 2], x: f64, e: f64, v: f64, vector: bool, h: f64) -> f64 {
    let comp = |s: usize| move |y: f64| psi(y)[s];
    let dp = [d1(&comp(0), x, h), d1(&comp(1), x, h)];
    let p = psi(x);
    let g0p = [p[0], -p[1]];
    let kp = if vector { g0p } else { p };
    let r0 = -dp[1] + g0p[0] * e - kp[0] * v;
    let r1 = -dp[0] + g0p[1] * e - kp[1] * v;
    r0.norm().max(r1.norm())
}

fn criterion_3() -> Outcome {
    let profile = barrier_with_delta()?;
    let h = 0.02;
    let sample_grid = ok(Grid::uniform(-6.0, 6.0, 1201))?;
    let (mut ode, mut flux) = (0f64, 0f64);
    for coupling in [Coupling::Scalar, Coupling::Vector] {
        let conv = Convention::default().with_coupling(coupling);
        let e = 1.4;
        let sol = ok(solve_dirac(&profile, e, &incoming(), &conv))?;
        let xs = interior_points(-5.0, 6.0, 1000, &sol.breakpoints(), 5.0 * h);
        let psi = |y: f64| sol.system_value(0, y, Side::Right).unwrap();
        for &x in &xs {
            let v = profile.value_at(x, Side::Right)[(0, 0)].re;
            ode = ode.max(dirac_ode_residual(&psi, x, e, v, coupling == Coupling::Vector, h));
        }
        let a = conv.current_matrix();
        let j: Vec<Complex64> = sample_grid
            .points()
            .iter()
            .map(|&x| {
                let u = sol.value(x, Side::Right).unwrap();
                (u.adjoint() * &a * &u)[(0, 0)]
            })
            .collect();
        flux = flux.max(max_dev(&j));
    }
    let (e, mass) = (1.1, 0.8);
    let sol = ok(solve_schrodinger(&profile, e, &incoming(), mass))?;
    let xs = interior_points(-5.0, 6.0, 1000, &sol.breakpoints(), 5.0 * h);
    let phi = |y: f64| sol.system_value(0, y, Side::Right).unwrap()[0];
    for &x in &xs {
        let v = profile.value_at(x, Side::Right)[(0, 0)].re;
        ode = ode.max((-d2(&phi, x, h) / (2.0 * mass) + phi(x) * (v - e)).norm());
    }
    let j: Vec<Complex64> = sample_grid
        .points()
        .iter()
        .map(|&x| {
            let [p, dp] = sol.system_value(0, x, Side::Right).unwrap();
            (dp.conj() * p - p.conj() * dp) * c(0.0, 1.0 / (2.0 * mass))
        })
        .collect();
    flux = flux.max(max_dev(&j));
    at_most("ODE residual", ode, 1e-10)?;
    at_most("probability current variation", flux, 1e-10)?;
    Ok(format!("ODE residual {ode:.1e} at 1000 points, current variation {flux:.1e}"))
}

fn criterion_4() -> Outcome {
    let s = ok(builtin_scenario("fig1a"))?;
    let b = ok(run_scenario(&s, &RunOptions::default()))?;
    let d = b.summary.domains.first().ok_or("no domain detected")?;
    ensure(b.summary.domains.len() == 1, "expected one domain")?;
    ensure((d.x_lo, d.x_hi) == (Some(-2.0), Some(2.0)), "domain is not (-2, 2)")?;
    let guard = b
        .summary
        .verdicts
        .iter()
        .find(|v| v.name.starts_with("locality"))
        .ok_or("no locality verdict")?;
    at_most("J_12 deviation in domain", d.max_deviation, 1e-8)?;
    at_least("variation outside domain", guard.value, 0.1)?;
    Ok(format!("deviation {:.1e} on (-2, 2), outside {:.2}", d.max_deviation, guard.value))
}

fn criterion_5() -> Outcome {
    let b = ok(run_scenario(&ok(builtin_scenario("free"))?, &RunOptions::default()))?;
    let q = b.summary.charge_relation.as_ref().ok_or("no charge relation")?;
    ensure(q.n_intervals == 10_000, "expected 10^4 Simpson intervals")?;
    at_most("quadrature vs boundary", q.discrepancy, 1e-6)?;
    let free = ok(PotentialProfile::single(&[(-1.0, 1.0, 0.0)], &[]))?;
    let s1 = ok(solve_dirac(&free, 1.2, &incoming(), &Convention::default()))?;
    let degenerate = charge_current_relation(&s1, &s1, 0.0, 1.0, 10_000);
    ensure(
        matches!(degenerate, Err(GceError::DegenerateEnergies(_))),
        "equal energies did not raise the degenerate-energies error",
    )?;
    Ok(format!("discrepancy {:.1e}, E1 = E2 rejected", q.discrepancy))
}

fn fig2_relation(lambda: f64, coupling: Coupling) -> Result<gce_core::scenario::DeltaSummary, String> {
    let mut s = ok(builtin_scenario("fig2"))?;
    s.set_delta_strength(lambda);
    let name = s.convention.as_ref().map_or("default".to_string(), |cv| cv.name.clone());
    s.convention = Some(ConventionChoice { name, coupling });
    let b = ok(run_scenario(&s, &RunOptions { tol: 1e-10 }))?;
    b.summary.delta_relations.first().cloned().ok_or_else(|| "no delta relation".to_string())
}

fn criterion_6() -> Outcome {
    let r = fig2_relation(0.0, Coupling::Vector)?;
    let zero = (r.c_minus - r.c_plus).norm();
    at_most("lambda = 0: |c- - c+|", zero, 1e-12)?;
    let (mut constancy, mut deviation) = (0f64, 0f64);
    for coupling in [Coupling::Scalar, Coupling::Vector] {
        for lambda in [PI / 6.0, PI / 3.0, PI / 2.0] {
            let r = fig2_relation(lambda, coupling)?;
            constancy = constancy.max(r.constancy_minus).max(r.constancy_plus);
            deviation = deviation.max((r.predicted_c_plus - r.c_plus).norm());
        }
    }
    let r = fig2_relation(2.0 * PI, Coupling::Vector)?;
    let period = (r.c_minus - r.c_plus).norm();
    at_most("per-domain constancy", constancy, 1e-10)?;
    at_most("|predicted c+ - c+|", deviation, 1e-10)?;
    at_most("lambda = 2pi: |c- - c+|", period, 1e-10)?;
    Ok(format!("lambda=0 {zero:.1e}, constancy {constancy:.1e}, junction {deviation:.1e}, 2pi {period:.1e}"))
}

fn criterion_7() -> Outcome {
    let basis = ok(build_basis(2))?;
    let profile = unequal_profile()?;
    let decomp = ok(decompose(&profile.potential_field(), &basis))?;
    let grid = ok(Grid::uniform(-4.0, 4.0, 801))?;
    let mut ratios = Vec::new();
    let stack = ok(DiracStack::from_systems(&dirac_states(&profile, &[1.3, 1.7], &Convention::default())?))?;
    for target in [Target::Generator(0), Target::Generator(1), Target::Pair(0, 1)] {
        let rep = ok(gce_convergence_dirac(&stack, &basis, target, &grid, &decomp))?;
        ratios.push(("dirac", target, 2f64.powf(rep.convergence_order.ok_or("no order")?)));
    }
    let waves: Vec<_> = (0..2)
        .map(|i| ok(solve_schrodinger(&ok(profile.restrict(i))?, [1.3, 1.7][i], &incoming(), 1.0)))
        .collect::<Result<_, _>>()?;
    let waves = ok(WaveStack::from_systems(&waves))?;
    for target in [Target::Generator(0), Target::Generator(1), Target::Pair(0, 1)] {
        let rep = ok(gce_convergence_schrodinger(&waves, &basis, target, &grid, &decomp, 1.0))?;
        ratios.push(("schrodinger", target, 2f64.powf(rep.convergence_order.ok_or("no order")?)));
    }
    for (model, target, ratio) in &ratios {
        at_most(&format!("{model} {target:?} |ratio - 4|"), (ratio - 4.0).abs(), 0.4)?;
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0f64), |(l, h), r| (l.min(r.2), h.max(r.2)));
    Ok(format!("halving ratios in [{lo:.3}, {hi:.3}]"))
}

fn criterion_8() -> Outcome {
    let basis = ok(build_basis(2))?;
    let profile = unequal_profile()?;
    let decomp = ok(decompose(&profile.potential_field(), &basis))?;
    let stack = ok(DiracStack::from_systems(&dirac_states(&profile, &[1.3, 1.7], &Convention::default())?))?;
    let grid = ok(Grid::uniform(-4.0, 4.0, 801))?;
    let a = ok(dirac_pair_current(&stack, 0, 1, &grid))?;
    let b = ok(dirac_pair_current(&stack, 1, 0, &grid))?;
    let mut worst = 0f64;
    for k in 0..grid.len() {
        worst = worst.max((a.j1[k] - b.j1[k].conj()).norm()).max((a.j0[k] - b.j0[k].conj()).norm());
    }
    let ra = ok(gce_residual_dirac(&stack, &basis, Target::Pair(0, 1), &grid, &decomp))?;
    let rb = ok(gce_residual_dirac(&stack, &basis, Target::Pair(1, 0), &grid, &decomp))?;
    for (x, y) in ra.residual.iter().zip(&rb.residual) {
        worst = worst.max((x - y.conj()).norm());
    }
    at_most("conjugate pairing", worst, 1e-13)?;
    Ok(format!("pair (1,2) vs conj (2,1): {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let b = ok(run_scenario(&ok(builtin_scenario("fig1b"))?, &RunOptions::default()))?;
    let parity: Vec<_> = b.summary.domains.iter().filter(|d| d.sigma == -1).collect();
    ensure(!parity.is_empty(), "no parity domain detected")?;
    let parity_dev = parity.iter().map(|d| d.max_deviation).fold(0.0, f64::max);

    let conv = Convention::default();
    let grid = ok(Grid::uniform(-5.0, 5.0, 1001))?;
    let one = ok(PotentialProfile::single(&[(-3.0, -1.0, 0.0), (-1.0, 1.0, 0.8), (1.0, 2.0, 0.2), (2.0, 3.0, 0.5)], &[]))?;
    let two = ok(PotentialProfile::single(
        &[(-3.0, -1.5, 0.3), (-1.5, 0.5, 0.0), (0.5, 2.5, 0.8), (2.5, 3.5, 0.2), (3.5, 4.0, 0.0)],
        &[],
    ))?;
    let profile = ok(PotentialProfile::stack(&[one, two]))?;
    let spec = TransformSpec::translation(1.5);
    let domains = ok(detect_domains(&profile, (0, 1), &spec, 1e-12))?;
    ensure(domains.len() == 1, "expected one translation domain")?;
    let states = dirac_states(&profile, &[1.3, 1.3], &conv)?;
    let cur = ok(transformed_current(&states[0], &states[1], &spec, &grid, &domains))?;
    let shift_dev = cur.domain_stats[0].max_deviation;

    let profile = unequal_profile()?;
    let states = dirac_states(&profile, &[1.3, 1.7], &conv)?;
    let plain = ok(dirac_pair_current(&ok(DiracStack::from_systems(&states))?, 0, 1, &grid))?;
    let ident = ok(transformed_current(&states[0], &states[1], &TransformSpec::identity(), &grid, &[]))?;
    at_most("parity deviation", parity_dev, 1e-8)?;
    at_most("translation deviation", shift_dev, 1e-8)?;
    ensure(plain.j1 == ident.j1 && plain.j0 == ident.j0, "identity transform differs from pair current")?;
    Ok(format!("parity {parity_dev:.1e}, translation {shift_dev:.1e}, identity bit-exact"))
}

/// Two-frequency solution per system in a uniform potential, rotated by exp(−i A T_3 t).
fn abelian_field(basis: &SunBasis, conv: &Convention, grid: &SpacetimeGrid, a3: f64) -> Result<SpinorField, String> {
    let free = ok(PotentialProfile::single(&[(-1.0, 1.0, 0.5)], &[]))?;
    let mut parts: Vec<Vec<SpinorSolution>> = Vec::new();
    for es in [[1.1, 1.6], [0.9, 1.4]] {
        parts.push(es.iter().map(|&e| ok(solve_dirac(&free, e, &incoming(), conv))).collect::<Result<_, _>>()?);
    }
    let t3 = ok(basis.generator(2))?.clone();
    ok(SpinorField::from_fn(grid, 2, conv, |t, x| {
        let mut out = Vec::new();
        for (i, sols) in parts.iter().enumerate() {
            let mut v = [c(0.0, 0.0); 2];
            for (s, w) in sols.iter().zip([c(1.0, 0.0), c(0.4, 0.3)]) {
                let u = s.system_value(0, x, Side::Right)?;
                let ph = Complex64::from_polar(1.0, -s.energy() * t) * w;
                v[0] += u[0] * ph;
                v[1] += u[1] * ph;
            }
            let gauge = Complex64::from_polar(1.0, -a3 * t3[(i, i)].re * t);
            out.push([v[0] * gauge, v[1] * gauge]);
        }
        Ok(out)
    }))
}

fn criterion_10() -> Outcome {
    let basis = ok(build_basis(2))?;
    let conv = Convention::default();
    let profile = ok(PotentialProfile::diagonal(&[(-1.0, 1.0, vec![0.4, -0.3])], &[]))?;
    let decomp = ok(decompose(&profile.potential_field(), &basis))?;
    let stack = ok(DiracStack::from_systems(&dirac_states(&profile, &[1.2, 1.2], &conv)?))?;
    let space = ok(Grid::uniform(-0.5, 0.5, 101))?;
    let times = ok(Grid::uniform(-0.1, 0.1, 3))?;
    let grid = ok(SpacetimeGrid::new(&times, &space))?;
    let psi = ok(SpinorField::from_stationary(&stack, &grid))?;
    let zero = ok(GaugeConfig::zero(&grid, &basis))?;
    let mut worst = 0f64;
    for a in 0..3 {
        let gauge = ok(gauge_residual(&psi, &zero, &basis, Some(&decomp), a))?;
        let plain = ok(gce_residual_dirac(&stack, &basis, Target::Generator(a), &space, &decomp))?;
        for (g, p) in gauge.residual.iter().zip(&plain.residual[1..space.len() - 1]) {
            worst = worst.max((g - p).norm());
        }
    }
    let a3 = 0.8;
    let run = |n: usize, nt: usize| -> Result<f64, String> {
        let times = ok(Grid::uniform(-0.4, 0.4, nt))?;
        let grid = ok(SpacetimeGrid::new(&times, &ok(Grid::uniform(-0.5, 0.5, n))?))?;
        let psi = abelian_field(&basis, &conv, &grid, a3)?;
        let config = ok(GaugeConfig::from_fn(&grid, &basis, |a, mu, _, _| if a == 2 && mu == 0 { a3 } else { 0.0 }))?;
        Ok(ok(gauge_residual(&psi, &config, &basis, None, 2))?.residual_norm)
    };
    let ratio = run(41, 33)? / run(81, 65)?;
    at_most("A = 0 vs ungauged", worst, 1e-13)?;
    at_most("abelian |ratio - 4|", (ratio - 4.0).abs(), 0.4)?;
    Ok(format!("A = 0 match {worst:.1e}, abelian ratio {ratio:.3}"))
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gce-lab"));
    cmd.env_remove("GCE_LAB_OUT");
    cmd
}

fn exit_code(out: &Output) -> Option<i32> {
    out.status.code()
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = ok(std::fs::read_dir(a))?.filter_map(|e| e.ok()).map(|e| e.file_name()).collect();
    names.sort();
    let other = ok(std::fs::read_dir(b))?.count();
    ensure(names.len() == other, "reruns wrote different file sets")?;
    for name in &names {
        let (x, y) = (ok(std::fs::read(a.join(name)))?, ok(std::fs::read(b.join(name)))?);
        ensure(x == y, &format!("{} differs between reruns", name.to_string_lossy()))?;
    }
    Ok(names.len())
}

fn criterion_11() -> Outcome {
    let tmp = ok(tempfile::tempdir())?;
    for name in builtin_names() {
        let s = ok(builtin_scenario(name))?;
        let path = tmp.path().join(format!("{name}.toml"));
        ok(std::fs::write(&path, ok(s.to_toml())?))?;
        let back: Scenario = ok(gce_core::load_scenario(&path))?;
        ensure(back == s, &format!("{name} does not round-trip"))?;
    }

    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for d in &dirs {
        let out = ok(bin().args(["run", "--scenario", "fig1b", "--grid", "801", "--out"]).arg(d).output())?;
        ensure(exit_code(&out) == Some(0), "passing run did not exit 0")?;
    }
    let files = same_tree(&dirs[0], &dirs[1])?;

    let fail = tmp.path().join("fail");
    let out = ok(bin().args(["currents", "--scenario", "fig1a", "--tol", "1e-20", "--grid", "401", "--out"]).arg(&fail).output())?;
    ensure(exit_code(&out) == Some(1), "failed verdict did not exit 1")?;
    ensure(fail.join("summary.json").exists(), "failed run wrote no summary")?;
    for args in [&["run", "--scenario", "no-such-scenario"][..], &["run"], &["run", "--scenario", "fig2", "--grid", "2"]] {
        let out = ok(bin().args(args).output())?;
        ensure(exit_code(&out) == Some(2), &format!("{args:?} did not exit 2"))?;
    }

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases: &[(&[&str], &str)] = &[
        (&["--help"], "help.txt"),
        (&["run", "--help"], "run_help.txt"),
        (&["scan", "--help"], "scan_help.txt"),
        (&["generators", "2"], "generators_2.txt"),
    ];
    for (args, file) in cases {
        let out = ok(bin().args(*args).output())?;
        let expected = ok(std::fs::read(golden.join(file)))?;
        ensure(exit_code(&out) == Some(0) && out.stdout == expected, &format!("{file} golden mismatch"))?;
    }
    Ok(format!(
        "{} scenarios round-trip, {files} report files byte-identical, exits 0/1/2, {} golden outputs",
        builtin_names().len(),
        cases.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("algebra invariants", criterion_1),
        ("decomposition round trip", criterion_2),
        ("solver exactness", criterion_3),
        ("local conservation", criterion_4),
        ("charge-current relation", criterion_5),
        ("delta-barrier relation", criterion_6),
        ("residual convergence", criterion_7),
        ("hermitian pairing", criterion_8),
        ("transformed currents", criterion_9),
        ("gauge diagnostic", criterion_10),
        ("tooling", criterion_11),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.1}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
