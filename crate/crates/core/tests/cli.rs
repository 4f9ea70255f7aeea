mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::*;
use moment_core::certs::Certificate;
use moment_core::rational::{int, rat};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Option<Value>,
    stderr: String,
}

fn moment(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_moment"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        report: serde_json::from_slice(&out.stdout).ok(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write(dir: &TempDir, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn hankel_exit_codes() {
    let dir = TempDir::new().unwrap();
    let lebesgue = write(&dir, "leb.json", &lebesgue_cube(1, 5));
    let r = moment(&["hankel", s(&lebesgue), "--gen", "x", "--gen", "1 - x", "--level", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.unwrap()["verdict"], "psd");

    let bad = moment_core::moments::MomentSequence::univariate(vec![int(1), int(0), int(-1)]).unwrap();
    let bad = write(&dir, "bad.json", &bad);
    let r = moment(&["hankel", s(&bad), "--level", "1"]);
    assert_eq!(r.code, 1);
    let report = r.report.unwrap();
    assert!(report["result"]["blocks"][0]["verdict"]["witness"].is_array());

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(moment(&["hankel", s(&garbage), "--level", "1"]).code, 2);
    assert_eq!(moment(&["hankel", "missing.json", "--level", "1"]).code, 2);
    assert_eq!(moment(&["hankel"]).code, 2);
}

#[test]
fn hausdorff_verdicts() {
    let dir = TempDir::new().unwrap();
    let half = moment_core::moments::MomentSequence::from_fn(1, 6, |e| {
        rat(1, 2i64.pow(e.exponents()[0]))
    });
    let p = write(&dir, "half.json", &half);
    assert_eq!(moment(&["hausdorff", s(&p)]).code, 0);

    let two = moment_core::moments::MomentSequence::from_fn(1, 6, |e| int(2i64.pow(e.exponents()[0])));
    let p = write(&dir, "two.json", &two);
    let r = moment(&["hausdorff", s(&p)]);
    assert_eq!(r.code, 1);
    let v = &r.report.unwrap()["result"]["first_violation"];
    assert_eq!(v["m"], serde_json::json!([0]));
    assert_eq!(v["n"], serde_json::json!([1]));

    let product = moment_core::moments::MomentSequence::from_fn(2, 6, |e| {
        rat(1, 2i64.pow(e.exponents()[0] + e.exponents()[1]))
    });
    let p = write(&dir, "product.json", &product);
    assert_eq!(moment(&["hausdorff", s(&p), "--up-to", "6"]).code, 0);
}

#[test]
fn certify_writes_verified_certificates() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("polya.json");
    let r = moment(&["certify", "--method", "polya", "--target", "x^2 - x*y + y^2", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report.unwrap()["result"]["n"], 1);
    let c: Certificate = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(c.verify());
    assert_eq!(moment(&["verify", s(&out)]).code, 0);

    let out = dir.path().join("handelman.json");
    let r = moment(&[
        "certify", "--method", "handelman", "--target", "x^2 - x + 1", "--gen", "x", "--gen", "1 - x",
        "--degree", "2", "--out", s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(moment(&["verify", s(&out)]).code, 0);

    let r = moment(&["certify", "--method", "farkas", "--target", "-1", "--gen", "x"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report.unwrap()["verdict"], "infeasible");

    let r = moment(&["certify", "--method", "bernstein", "--k", "6"]);
    assert_eq!(r.code, 0);
    let r = moment(&["certify", "--method", "polya", "--target", "x^2 - 2*x*y + y^2", "--n-max", "5"]);
    assert_eq!(r.code, 1);
    let r = moment(&["certify", "--method", "polya", "--target", "x + 1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn tampered_certificate_is_invalid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.json");
    assert_eq!(moment(&["certify", "--method", "bernstein", "--k", "3", "--out", s(&out)]).code, 0);
    let mut c: Certificate = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    c.terms[0].coeff += rat(1, 7);
    let tampered = write(&dir, "t.json", &c);
    let r = moment(&["verify", s(&tampered)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report.unwrap()["verdict"], "invalid");
}

#[test]
fn extract_recovers_two_atoms() {
    let dir = TempDir::new().unwrap();
    let atoms = [(vec![int(0)], rat(1, 2)), (vec![int(1)], rat(1, 2))];
    let p = write(&dir, "two.json", &sequence_from_atoms(1, &atoms, 5));
    let out = dir.path().join("measure.json");
    let r = moment(&["extract", s(&p), "--level", "2", "--seed", "7", "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let mut pts: Vec<f64> = m["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["point"][0].as_f64().unwrap())
        .collect();
    pts.sort_by(f64::total_cmp);
    assert!((pts[0] - 0.0).abs() < 1e-9 && (pts[1] - 1.0).abs() < 1e-9);
    assert_eq!(m["flat"], true);

    let rank_one = write(&dir, "dirac.json", &sequence_from_atoms(1, &[(vec![rat(1, 3)], int(2))], 5));
    let r = moment(&["extract", s(&rank_one), "--level", "2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report.unwrap()["result"]["measure"]["atoms"].as_array().unwrap().len(), 1);

    let bad = moment_core::moments::MomentSequence::univariate(vec![int(1), int(0), int(-1), int(0)]).unwrap();
    let bad = write(&dir, "bad.json", &bad);
    let r = moment(&["extract", s(&bad), "--level", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.report.unwrap()["result"]["witness"].is_array());
}

#[test]
fn extract_warns_on_non_flat_data() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "circle.json", &circle_sequence(5));
    let r = moment(&["extract", s(&p), "--level", "2"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("WARN"), "{}", r.stderr);
    let report = r.report.unwrap();
    assert_eq!(report["verdict"], "best_effort");
    assert!(!report["result"]["warnings"].as_array().unwrap().is_empty());
    assert!(report["result"]["measure"]["atoms"].is_array());
}

#[test]
fn archimedean_fixtures() {
    let dir = TempDir::new().unwrap();
    let cone = |kind: &str, f: &[&str]| serde_json::json!({ "kind": kind, "f": f, "g": [] });
    let simplex = write(&dir, "simplex.json", &cone("semiring", &["x", "y", "1 - x - y"]));
    assert_eq!(moment(&["archimedean", s(&simplex), "--degree", "2"]).code, 0);
    let ball = write(&dir, "ball.json", &cone("quadratic_module", &["1 - x^2 - y^2"]));
    assert_eq!(moment(&["archimedean", s(&ball)]).code, 0);
    let bad = write(&dir, "bad.json", &cone("quadratic_module", &["2x - 1", "2y - 1", "1 - x*y"]));
    let r = moment(&["archimedean", s(&bad), "--degree", "3"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report.unwrap()["verdict"], "inconclusive");
}

#[test]
fn in_process_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = moment_core::cli::run(
        ["moment", "certify", "--method", "bernstein", "--k", "2"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    let report: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(report["command"], "certify");
    assert_eq!(report["inputs"]["k"], 2);
    assert!(report["elapsed_ms"].is_number());
    assert!(report["version"].is_string());
}
