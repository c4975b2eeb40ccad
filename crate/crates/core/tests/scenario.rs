use std::f64::consts::PI;

use gce_core::scenario::{
    builtin_names, builtin_scenario, builtin_source, load_scenario, run_scenario, scan_scenario,
    solve_report, write_reports, Model, OutputKind, RunOptions, Scenario,
};
use gce_core::{GceError, Side};

fn opts() -> RunOptions {
    RunOptions::default()
}

#[test]
fn builtins_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for name in builtin_names() {
        let s = builtin_scenario(name).unwrap();
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, s.to_toml().unwrap()).unwrap();
        let back = load_scenario(&path).unwrap();
        assert_eq!(s, back, "{name}");
        assert_eq!(back.to_toml().unwrap(), s.to_toml().unwrap());
    }
}

#[test]
fn fig2_file_contents() {
    let s = builtin_scenario("fig2").unwrap();
    assert_eq!(s.model, Model::Dirac);
    let deltas = s.profile.deltas();
    assert_eq!(deltas.len(), 1);
    assert_eq!(deltas[0].x0, 0.0);
    assert!((deltas[0].strength[(0, 0)].re - PI / 3.0).abs() < 1e-15);
    assert_eq!(deltas[0].strength[(1, 1)].norm(), 0.0);
    let t = s.transform.unwrap();
    assert_eq!((t.sigma, t.rho), (-1, 0.0));
    // V1(x) = V2(−x) away from the barrier.
    for k in 0..=60 {
        let x = -3.05 + 0.1 * k as f64;
        let v1 = s.profile.value_at(x, Side::Right)[(0, 0)];
        let v2 = s.profile.value_at(-x, Side::Right)[(1, 1)];
        assert_eq!(v1, v2, "x = {x}");
    }
}

#[test]
fn free_file_has_zero_potential() {
    let s = builtin_scenario("free").unwrap();
    assert!(s.profile.segments().iter().all(|seg| seg.v.iter().all(|z| z.norm() == 0.0)));
}

fn overlapping() -> String {
    builtin_source("free").unwrap().replace(
        "x_hi = 6.283185307179586\ndiag = [0.0, 0.0]",
        "x_hi = 3.0\ndiag = [0.0, 0.0]\n\n[[profile.segments]]\nx_lo = 2.0\nx_hi = 6.283185307179586\ndiag = [0.0, 0.0]",
    )
}

#[test]
fn overlapping_segments_are_a_schema_violation() {
    match Scenario::from_toml_str(&overlapping(), "overlap") {
        Err(GceError::Schema { key, message, .. }) => {
            assert_eq!(key, "profile.segments");
            assert!(message.contains("segments[0]") && message.contains("segments[1]"), "{message}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn load_errors() {
    let missing = load_scenario("/nonexistent/scenario.toml").unwrap_err();
    assert!(matches!(missing, GceError::Io { .. }));

    let text = builtin_source("free").unwrap().replace("n_points = 4001", "n_points = 2");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Invariant { rule, .. }) => assert_eq!(rule, "n_points >= 3"),
        other => panic!("unexpected {other:?}"),
    }
    let text = builtin_source("free").unwrap().replace("x_max = 6.283185307179586\nn_points", "x_max = -1.0\nn_points");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Invariant { rule, .. }) => assert_eq!(rule, "x_min < x_max"),
        other => panic!("unexpected {other:?}"),
    }
    let text = builtin_source("free").unwrap().replace("model = \"dirac\"", "model = \"klein\"");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Schema { key, .. }) => assert_eq!(key, "model"),
        other => panic!("unexpected {other:?}"),
    }
    let text = builtin_source("free").unwrap().replace("n_systems = 2\n", "");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Schema { key, .. }) => assert_eq!(key, "n_systems"),
        other => panic!("unexpected {other:?}"),
    }
    let text = builtin_source("fig2").unwrap().replace("name = \"default\"", "name = \"weyl\"");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Schema { key, .. }) => assert_eq!(key, "convention.name"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn fig2_lambda_zero_gives_one_value() {
    let mut s = builtin_scenario("fig2").unwrap();
    s.set_delta_strength(0.0);
    let b = run_scenario(&s, &opts()).unwrap();
    assert!(b.passed());
    let d = &b.summary.delta_relations[0];
    assert!((d.c_minus - d.c_plus).norm() <= 1e-12);
    let parity: Vec<_> = b.summary.domains.iter().filter(|d| d.sigma == -1).collect();
    assert_eq!(parity.len(), 1);
}

#[test]
fn fig2_rotation_relation() {
    let b = run_scenario(&builtin_scenario("fig2").unwrap(), &opts()).unwrap();
    assert!(b.passed(), "{:?}", b.summary.verdicts);
    let parity: Vec<_> = b.summary.domains.iter().filter(|d| d.sigma == -1).collect();
    assert_eq!(parity.len(), 2);
    assert!(parity.iter().all(|d| d.pass == Some(true)));
    let d = &b.summary.delta_relations[0];
    assert!(d.deviation <= 1e-10);
    assert!((d.c_minus - d.c_plus).norm() > 1e-3);
}

#[test]
fn fig1a_local_conservation() {
    let b = run_scenario(&builtin_scenario("fig1a").unwrap(), &opts()).unwrap();
    assert!(b.passed());
    assert_eq!(b.summary.domains.len(), 1);
    assert_eq!(b.summary.domains[0].pass, Some(true));
    assert!(b.summary.verdicts.iter().any(|v| v.name.starts_with("locality") && v.pass));
}

#[test]
fn reports_are_written_and_deterministic() {
    let s = builtin_scenario("fig1a").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files_a = write_reports(&run_scenario(&s, &opts()).unwrap(), a.path()).unwrap();
    let files_b = write_reports(&run_scenario(&s, &opts()).unwrap(), b.path()).unwrap();
    assert_eq!(files_a.len(), files_b.len());
    for (fa, fb) in files_a.iter().zip(&files_b) {
        assert_eq!(fa.file_name(), fb.file_name());
        assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap());
    }
    let pair = std::fs::read_to_string(a.path().join("current_pair_1_2.csv")).unwrap();
    let mut lines = pair.lines();
    assert_eq!(lines.next(), Some("x,re_j1,im_j1,re_j0,im_j0"));
    assert_eq!(lines.count(), s.grid.n_points);
    assert!(!pair.contains('\r'));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], serde_json::Value::Bool(true));
    assert_eq!(summary["domains"][0]["pass"], serde_json::Value::Bool(true));
}

#[test]
fn empty_outputs_write_only_the_summary() {
    let mut s = builtin_scenario("free").unwrap();
    s.requested_outputs.clear();
    let dir = tempfile::tempdir().unwrap();
    let files = write_reports(&run_scenario(&s, &opts()).unwrap(), dir.path()).unwrap();
    assert_eq!(files.len(), 1);
    assert!(files[0].ends_with("summary.json"));
}

#[test]
fn solver_stage_table() {
    let s = builtin_scenario("unequal-potentials-schrodinger").unwrap();
    let b = solve_report(&s, &opts()).unwrap();
    let t = b.table("solution").unwrap();
    assert_eq!(t.rows.len(), s.grid.n_points);
    assert_eq!(t.header.len(), 1 + 4 * s.n_systems);
    assert_eq!(b.summary.scattering.len(), 2);
    for sc in &b.summary.scattering {
        assert!((sc.reflectance + sc.transmittance - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scan_reports_second_order() {
    let s = builtin_scenario("unequal-potentials").unwrap();
    let b = scan_scenario(&s, &[1e-2, 5e-3, 2.5e-3], &opts()).unwrap();
    assert!(b.passed(), "{:?}", b.summary.verdicts);
    let orders: Vec<f64> = b.summary.scan.iter().filter_map(|s| s.order).collect();
    assert!(!orders.is_empty());
    assert!(orders.iter().all(|o| (o - 2.0).abs() <= 0.2));
    assert!(scan_scenario(&s, &[3e-3, 1e-3], &opts()).is_err());
}

#[test]
fn run_errors_carry_the_scenario_name() {
    let mut s = builtin_scenario("free").unwrap();
    s.energies = vec![1.0, 1.0];
    let err = run_scenario(&s, &opts()).unwrap_err();
    match err {
        GceError::InScenario { scenario, source } => {
            assert_eq!(scenario, "free");
            assert!(matches!(*source, GceError::DegenerateEnergies(_)));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn pair_outputs_need_two_dirac_systems() {
    let text = builtin_source("unequal-potentials-schrodinger")
        .unwrap()
        .replace("requested_outputs = [\"currents\", \"residuals\"]", "requested_outputs = [\"charge_relation\"]");
    match Scenario::from_toml_str(&text, "t") {
        Err(GceError::Invariant { rule, .. }) => assert_eq!(rule, "two uncoupled dirac systems"),
        other => panic!("unexpected {other:?}"),
    }
    let s = builtin_scenario("free").unwrap();
    assert!(s.requested_outputs.contains(&OutputKind::ChargeRelation));
}
