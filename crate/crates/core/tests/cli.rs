use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use valuation_lab::geometry::MomentMatrix;
use valuation_lab::harness::SuiteReport;
use valuation_lab::io;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valuation-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn moment_of_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "square.poly", r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]}"#);
    let out = bin(&["moment", "--input", &sq]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3.3333333333333331e-1") && text.contains("2.5000000000000000e-1"), "{text}");
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let m: MomentMatrix = serde_json::from_value(doc["moment"].clone()).unwrap();
    assert_eq!(m.get(0, 0), 1.0 / 3.0);
    assert_eq!(m.get(0, 1), 0.25);
}

#[test]
fn rotation_in_three_dimensions_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.spec",
        r#"{"n": 3, "p": 1, "s": 1, "xi": {"label": "t", "expression": "t", "p": 1, "d": 1}}"#,
    );
    let out = bin(&["psi", "--spec", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("only admissible for n = 2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn psi_writes_a_readable_document() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "good.spec",
        r#"{"n": 2, "p": 2, "s": 5, "xi": {"label": "t|t|", "expression": "t * |t|", "p": 2, "d": 1}}"#,
    );
    let h = write(
        dir.path(),
        "h.json",
        r#"{"dim": 2, "pieces": [{"alpha": 2, "polytope": {"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]}}]}"#,
    );
    let dest = dir.path().join("psi.json");
    let out = bin(&["psi", "--spec", &spec, "--input", &h, "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&dest).unwrap()).unwrap();
    let psi: MomentMatrix = serde_json::from_value(doc["psi"].clone()).unwrap();
    assert!((psi.get(0, 1) + 4.0).abs() < 1e-14);
    assert!((psi.get(1, 0) - 6.0).abs() < 1e-14);
    // the embedded spec is accepted back
    let spec: valuation_lab::valuation::ValuationSpec = serde_json::from_value(doc["spec"].clone()).unwrap();
    assert_eq!(spec.s, 5.0);
}

#[test]
fn verify_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = bin(&["verify", "--dim", "3", "--p", "2", "--cases", "100", "--seed", "7", "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&dest).unwrap();
    let report: SuiteReport = io::from_str(&text).unwrap();
    assert!(report.passed);
    assert_eq!(report.config.dims, vec![3]);
    assert_eq!(report.schema_version, 1);
    assert_eq!(io::to_string(&report).unwrap(), text);
}

#[test]
fn extract_approx_and_crosscheck() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.spec",
        r#"{"n": 2, "p": 1, "s": -5, "xi": {"label": "2t", "expression": "2*t", "p": 1, "d": 2}}"#,
    );
    let out = bin(&["extract", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["passed"], true);
    assert!((doc["extraction"]["s_hat"].as_f64().unwrap() + 5.0).abs() < 1e-12);

    let tri = write(dir.path(), "tri.poly", r#"{"dim": 2, "vertices": [[0,0],[1,0],[0,1]]}"#);
    let out = bin(&["approx", "--input", &tri, "--delta", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["cells"], 6);
    assert_eq!(doc["gap"].as_f64().unwrap(), 0.125);
    let out = bin(&["approx", "--input", &tri, "--delta", "0.3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin(&["crosscheck", "--dim", "3", "--cases", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["targets"].as_array().unwrap().len(), 3);
}

#[test]
fn growth_probe_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(dir.path(), "ok.xi", r#"{"label": "2|t|^2", "expression": "2*|t|^2", "p": 2, "d": 2}"#);
    let out = bin(&["probe-growth", "--spec", &ok]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["report"]["max_ratio"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let bad = write(dir.path(), "bad.xi", r#"{"label": "|t|^4", "expression": "|t|^4", "p": 2, "d": 1}"#);
    let out = bin(&["probe-growth", "--spec", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["verdict"], "violation");
}

#[test]
fn malformed_input_and_unknown_flags() {
    let dir = tempfile::tempdir().unwrap();
    let junk = write(dir.path(), "junk.poly", "{\"dim\": 2, \"vertices\": [[0,0],[1]]}");
    let out = bin(&["moment", "--input", &junk]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
    let out = bin(&["moment", "--input", &junk, "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["teleport"]);
    assert_eq!(out.status.code(), Some(2));
}
