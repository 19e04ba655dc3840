//! End-to-end checks of the command-line interface: exit codes, JSON shape,
//! CSV artifacts, and determinism of repeated runs.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_detwalk"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn parse(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout.trim()).expect("stdout is one JSON document")
}

fn metric(v: &serde_json::Value, key: &str) -> f64 {
    v["metrics"][key]
        .as_f64()
        .unwrap_or_else(|| panic!("metric {key} missing in {v}"))
}

#[test]
fn verify_subspace_vertex_walk_passes() {
    let (code, out, _) = run(&[
        "verify-subspace",
        "--layer",
        "vertex5",
        "--n",
        "6",
        "--r",
        "2",
        "--theta1",
        "1.1",
        "--theta2",
        "0.7",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["pass"], true);
    assert!(metric(&v, "maxdev") <= 1e-10);
    assert!(metric(&v, "leakage") <= 1e-10);
}

#[test]
fn verify_subspace_rejects_degenerate_classes() {
    let (code, _, err) = run(&["verify-subspace", "--layer", "layer1", "--n", "7", "--r1", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("empty"), "stderr: {err}");
}

#[test]
fn verify_subspace_product_walk_passes() {
    let (code, out, _) = run(&[
        "verify-subspace",
        "--layer",
        "layer4",
        "--r1",
        "5",
        "--r2",
        "5",
        "--m",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(metric(&parse(&out), "maxdev") <= 1e-10);
}

#[test]
fn solve_long_boundary_case() {
    let (code, out, _) = run(&["solve", "--scheme", "long", "--lambda", "0.25", "--k", "1"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!((metric(&v, "alpha") - std::f64::consts::PI).abs() < 1e-7);
    assert!(metric(&v, "fidelity") >= 1.0 - 1e-10);
}

#[test]
fn solve_requires_scheme_parameters() {
    let (code, _, _) = run(&["solve", "--scheme", "long"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["solve", "--scheme", "long", "--lambda", "1.5"]);
    assert_eq!(code, 2);
}

#[test]
fn solve_fixed_beta_and_degenerate_lambda() {
    let (code, out, _) = run(&[
        "solve",
        "--scheme",
        "fixed-beta",
        "--lambda",
        "0.2",
        "--beta",
        "4.05",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!(metric(&v, "fidelity") >= 1.0 - 1e-10);
    assert!(metric(&v, "k") >= metric(&v, "k_lower"));

    let (code, out, _) = run(&["solve", "--scheme", "fixed-beta", "--lambda", "1.0"]);
    assert_eq!(code, 0);
    assert_eq!(metric(&parse(&out), "k"), 0.0);
}

#[test]
fn solve_eedp_small_case() {
    let (code, out, _) = run(&["solve", "--scheme", "eedp", "--n", "100", "--r", "10"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(metric(&v, "t"), 30.0);
    assert!(metric(&v, "residual") <= 1e-8);
}

#[test]
fn simulate_generated_instances() {
    let (code, out, _) = run(&[
        "simulate", "--n", "128", "--plant", "--gen-seed", "11", "--seed", "4",
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(metric(&v, "verdict_found"), 1.0);
    assert_eq!(metric(&v, "oracle_agrees"), 1.0);
    for layer in 1..=4 {
        assert!(metric(&v, &format!("fidelity_layer{layer}")) >= 1.0 - 1e-9);
    }

    let (code, out, _) = run(&["simulate", "--n", "128", "--gen-seed", "12"]);
    assert_eq!(code, 0);
    assert_eq!(metric(&parse(&out), "verdict_found"), 0.0);
}

#[test]
fn simulate_rejects_bad_instance_files() {
    let dir = std::env::temp_dir();
    let bad = dir.join(format!("detwalk_bad_{}.json", std::process::id()));
    std::fs::write(&bad, "{\"n\": 8}").unwrap();
    let (code, _, _) = run(&["simulate", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code, 2);

    // Two planted triples break the promise.
    let n = 8;
    let mut w = vec![0u64; n * n];
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        w[a * n + b] = 1;
        w[b * n + a] = 1;
    }
    let cells: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    let text = format!(
        "{{\"n\":8,\"M\":4,\"d\":3,\"weights\":[{}]}}",
        cells.join(",")
    );
    let violating = dir.join(format!("detwalk_violating_{}.json", std::process::id()));
    std::fs::write(&violating, text).unwrap();
    let (code, _, err) = run(&["simulate", "--instance", violating.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("promise"), "stderr: {err}");
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(violating);
}

#[test]
fn ledger_formula_mode_and_rounding_gate() {
    let (code, out, _) = run(&["ledger", "--n", "128", "--mode", "formula"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(metric(&v, "c3"), 16.0);
    assert_eq!(metric(&v, "u4"), 1.0);

    let (code, _, _) = run(&["ledger", "--n", "100"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(&["ledger", "--n", "150", "--rounded", "--mode", "formula"]);
    assert_eq!(code, 0);
    assert!(metric(&parse(&out), "c0") > 0.0);
}

#[test]
fn sweep_writes_csv_and_rejects_empty_grids() {
    let dir = std::env::temp_dir();
    let csv = dir.join(format!("detwalk_sweep_{}.csv", std::process::id()));
    let (code, out, _) = run(&[
        "sweep",
        "--what",
        "ledger",
        "--n-pows",
        "2..3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!(v["artifacts"]["rows"].as_array().unwrap().len() == 2);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.split('\n').collect();
    assert_eq!(lines[0], "j,n,c0_actual,ratio_actual,c0_formula,ratio_formula,c1_identity_dev,ok");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[3], "");
    assert!(!text.contains('\r'));
    let _ = std::fs::remove_file(csv);

    let (code, _, _) = run(&["sweep", "--what", "ledger", "--n-pows", "9..2"]);
    assert_eq!(code, 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "simulate", "--n", "128", "--plant", "--gen-seed", "5", "--seed", "9",
    ];
    let (c1, out1, _) = run(&args);
    let (c2, out2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(out1, out2);
}

#[test]
fn unknown_arguments_are_rejected() {
    let (code, _, _) = run(&["ledger", "--n", "128", "--frobnicate"]);
    assert_eq!(code, 2);
}
