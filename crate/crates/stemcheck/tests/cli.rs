use std::path::Path;

use stemcheck::cli::{self, EXIT_ERROR, EXIT_FULLY_COMPLIANT, EXIT_NOT_FULLY_COMPLIANT};
use stemcheck::io::{self, ReportDocument};
use stemcheck::{fixtures, ConditionalObligation};
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["stemcheck"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn fig1_files(dir: &TempDir) -> (String, String) {
    let model = write(
        dir.path(),
        "model.json",
        &io::print_model(&fixtures::fig1()),
    );
    let obs = write(
        dir.path(),
        "obligations.json",
        &io::print_obligations(&[fixtures::fig1_obligation()]),
    );
    (model, obs)
}

#[test]
fn check_reports_violation() {
    let dir = TempDir::new().unwrap();
    let (model, obs) = fig1_files(&dir);
    let r = run(&["check", &model, &obs]);
    assert_eq!(r.code, EXIT_NOT_FULLY_COMPLIANT, "{}", r.err);
    assert!(r.out.starts_with("Not Fully Compliant\n"), "{}", r.out);
    assert!(r.out.contains("t3"));
}

#[test]
fn machine_report_parses_back() {
    let dir = TempDir::new().unwrap();
    let (model, obs) = fig1_files(&dir);
    let r = run(&[
        "check", &model, &obs, "--mode", "both", "--format", "machine",
    ]);
    assert_eq!(r.code, EXIT_NOT_FULLY_COMPLIANT, "{}", r.err);
    let doc = ReportDocument::from_json(&r.out).unwrap();
    assert!(!doc.is_fully_compliant());
    assert_eq!(doc.oracle.unwrap().level, "partial");
    assert_eq!(doc.obligations[0].witness.as_ref().unwrap().trigger, "t3");
}

#[test]
fn empty_framework_is_compliant() {
    let dir = TempDir::new().unwrap();
    let (model, _) = fig1_files(&dir);
    let obs = write(dir.path(), "none.json", "[]");
    for mode in ["engine", "oracle", "both"] {
        assert_eq!(
            run(&["check", &model, &obs, "--mode", mode]).code,
            EXIT_FULLY_COMPLIANT
        );
    }
}

#[test]
fn compliant_obligation_passes() {
    let dir = TempDir::new().unwrap();
    let (model, _) = fig1_files(&dir);
    let ob = ConditionalObligation::achievement("c", "a", "zz").unwrap();
    let obs = write(dir.path(), "ob.json", &io::print_obligations(&[ob]));
    let r = run(&["check", &model, &obs, "--mode", "both"]);
    assert_eq!(r.code, EXIT_FULLY_COMPLIANT, "{}{}", r.out, r.err);
}

#[test]
fn early_exit_flag_keeps_exit_code() {
    let dir = TempDir::new().unwrap();
    let (model, obs) = fig1_files(&dir);
    assert_eq!(
        run(&["check", &model, &obs, "--no-early-exit"]).code,
        EXIT_NOT_FULLY_COMPLIANT
    );
}

#[test]
fn oracle_command() {
    let dir = TempDir::new().unwrap();
    let (model, obs) = fig1_files(&dir);
    let r = run(&["oracle", &model, &obs]);
    assert_eq!(r.code, EXIT_NOT_FULLY_COMPLIANT);
    assert!(r.out.contains("partial"), "{}", r.out);
}

#[test]
fn enumerate_lists_traces() {
    let dir = TempDir::new().unwrap();
    let (model, _) = fig1_files(&dir);
    let r = run(&["enumerate", &model]);
    assert_eq!(r.code, 0);
    assert_eq!(r.out.lines().count(), 4);
    assert!(r.out.contains("(start,t3,t2,t4,end) | "));
}

#[test]
fn errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let (model, _) = fig1_files(&dir);
    let missing = dir.path().join("missing.json");
    let r = run(&["check", &model, missing.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_ERROR);
    assert!(r.err.contains("missing.json"));
    let bad = write(dir.path(), "bad.json", "{\"atoms\": [}");
    assert_eq!(run(&["enumerate", &bad]).code, EXIT_ERROR);
    assert_eq!(run(&["frobnicate"]).code, EXIT_ERROR);
    let r = run(&[
        "oracle",
        &model,
        &write(dir.path(), "o.json", "[]"),
        "--budget",
        "2",
    ]);
    assert_eq!(r.code, EXIT_ERROR);
}

#[test]
fn gen_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.json");
    let o = dir.path().join("o.json");
    let r = run(&[
        "gen",
        "--seed",
        "7",
        "--obligations",
        "2",
        "--model-out",
        m.to_str().unwrap(),
        "--obligations-out",
        o.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    let engine = run(&["check", m.to_str().unwrap(), o.to_str().unwrap()]);
    let both = run(&[
        "check",
        m.to_str().unwrap(),
        o.to_str().unwrap(),
        "--mode",
        "both",
    ]);
    assert!(engine.code == EXIT_FULLY_COMPLIANT || engine.code == EXIT_NOT_FULLY_COMPLIANT);
    assert_eq!(engine.code, both.code);
}

#[test]
fn bench_small() {
    let r = run(&["bench", "--max-tasks", "100", "--format", "machine"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}
