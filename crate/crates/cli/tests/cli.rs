use std::fs;
use std::process::{Command, Output};

use torus_soliton_cli::golden::{self, GoldenEntry};
use torus_soliton_core::catalog;
use torus_soliton_core::invariants::extremal;
use torus_soliton_core::json::DirectionJson;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-soliton"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out: Output = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn analyze_p2_is_stable() {
    let (code, out) = run(&["analyze", "P2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("eta        [0, 0] + 0"));
    assert!(out.contains("m_X        1\n"));
    assert!(out.contains("verdict    stable_on_family"));
}

#[test]
fn blowup_without_soliton_vector_is_destabilized_by_normal_cones() {
    let (code, out) = run(&["analyze", "BL1P2", "--eta", "zero", "--family", "normal-cones"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("verdict    destabilized"));
}

#[test]
fn line_slope_table_passes() {
    let (code, out) = run(&["slope-check", "P1", "--mu", "1", "--T", "40"]);
    assert_eq!(code, 0, "{out}");
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.ends_with("true")), "{out}");
}

#[test]
fn report_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    for (name, eta) in [("BL1P2", "auto"), ("BL2P2", "zero"), ("P1", "auto")] {
        let (code, _) = run(&["analyze", name, "--eta", eta, "--emit-json", first.to_str().unwrap()]);
        let (again, out) = run(&[
            "analyze",
            "--from-report",
            first.to_str().unwrap(),
            "--emit-json",
            second.to_str().unwrap(),
        ]);
        assert_eq!(code, again);
        assert!(out.contains("round trip: identical"), "{out}");
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    }
}

#[test]
fn edited_report_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    run(&["analyze", "P2", "--emit-json", path.to_str().unwrap()]);
    let text = fs::read_to_string(&path)
        .unwrap()
        .replace("\"m_x\": \"1\"", "\"m_x\": \"2\"");
    fs::write(&path, text).unwrap();
    let (code, out) = run(&["analyze", "--from-report", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("differs"));
}

#[test]
fn stored_golden_values_match_recomputation() {
    let (code, out) = run(&["catalog"]);
    assert_eq!(code, 0, "{out}");
    let stored: Vec<GoldenEntry> = serde_json::from_str(&fs::read_to_string(golden::DEFAULT_PATH).unwrap()).unwrap();
    assert_eq!(stored.len(), catalog::ENTRIES.len());
    for (s, e) in stored.iter().zip(&catalog::ENTRIES) {
        assert_eq!(s.name, e.name);
        let eta = extremal(&e.polytope()).unwrap();
        assert_eq!(s.eta, DirectionJson::from_direction(&eta));
    }
}

#[test]
fn bless_writes_only_the_given_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let (code, _) = run(&["catalog", "--bless", "--golden", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(
        fs::read_to_string(&path).unwrap(),
        fs::read_to_string(golden::DEFAULT_PATH).unwrap()
    );
    let (code, out) = run(&["catalog", "--golden", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["frobnicate"],
        vec!["analyze"],
        vec!["analyze", "P7"],
        vec!["analyze", "P2", "--eta", "1,2,3,4"],
        vec!["eval-tc", "P2"],
        vec!["eval-tc", "P2", "--cone", "0+1+2@1/2"],
        vec!["solve", "P2", "--grid", "17"],
    ] {
        assert_eq!(run(&args).0, 64, "{args:?}");
    }
}

#[test]
fn test_configurations_evaluate_exactly() {
    let (code, out) = run(&["eval-tc", "BL1P2", "--cone", "exceptional", "--eta", "zero"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"D_eta_na\": \"-1/6\""), "{out}");
    let (_, out) = run(&["eval-tc", "BL1P2", "--cone", "exceptional"]);
    assert!(out.contains("\"D_eta_na\": \"0\""));
    let (_, out) = run(&["eval-tc", "P1", "--mu=-1"]);
    assert!(out.contains("\"L0_na\": \"1\""));
    let cfg = r#"{"pieces": [{"a": ["1"], "b": "-1/2"}], "include_zero": true}"#;
    let (code, out) = run(&["eval-tc", "P1", "--config", cfg]);
    assert_eq!(code, 0);
    // min(0, x - 1/2) on [-1, 1]
    assert!(out.contains("\"E_na\": \"-9/16\""), "{out}");
    let (code, out) = run(&["jt-min", "BL1P2", "--cone", "exceptional"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"certificate_verified\": true"));
    assert!(out.contains("\"value\": \"0\""));
}

#[test]
fn destabilizer_search_exit_codes() {
    assert_eq!(run(&["destabilize", "BL1P2", "--eta", "zero"]).0, 2);
    assert_eq!(run(&["destabilize", "BL1P2"]).0, 0);
    assert_eq!(run(&["destabilize", "BL1P2", "--max-candidates", "10"]).0, 1);
    let a = run(&["destabilize", "BL1P2", "--eta", "zero", "--randomize", "--seed", "7"]);
    let b = run(&["destabilize", "BL1P2", "--eta", "zero", "--randomize", "--seed", "7"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 2);
}

#[test]
fn flow_writes_trace_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let dump = dir.path().join("d.json");
    let (code, out) = run(&[
        "flow",
        "P1",
        "--grid",
        "129",
        "--tol",
        "1e-4",
        "--trace",
        trace.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("step,t,dt,residual,R,D_eta,D,J,H,M_eta"));
    // restarting from the converged dump stops at once
    let (code, out) = run(&["flow", "P1", "--tol", "1e-4", "--start", dump.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("steps      0 accepted"), "{out}");
    let (code, out) = run(&["flow", "BL1P2", "--grid", "33", "--steps", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("converged  false"));
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let args = ["analyze", "BL3P2", "--emit-json", "-"];
    let a = bin().args(args).env("TORUS_SOLITON_THREADS", "1").output().unwrap();
    let b = bin().args(args).output().unwrap();
    let c = bin().arg("--sequential").args(args).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn in_process_run_reports_help() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = torus_soliton_cli::run(["torus-soliton", "--help"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert!(String::from_utf8(out).unwrap().contains("slope-check"));
}
