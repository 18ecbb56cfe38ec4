//! End-to-end runs of the `chiral` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn chiral(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiral")).args(args).output().expect("binary runs")
}

fn input(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("inputs").join(name).display().to_string()
}

#[test]
fn arnold_suite_passes_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arnold.json");
    let out = chiral(&["verify", "arnold", "--n", "2", "--k", "3", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "verify arnold");
    assert!(v["checks"][0]["witness"].as_str().unwrap().starts_with("(add"));
}

#[test]
fn reports_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = chiral(&["verify", "mu2", "--n", "2", "--seed", "9", "--trials", "5", "--json", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn triangle_through_mu3() {
    let out = chiral(&["compute", "mu3", "--input", &input("triangle.sexp")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(mul 1/2 (lam 1 2) (lam 2 3) (omega (1 2 3)))"), "{text}");
    assert!(text.contains("(mul -1/2 (lam 1 3) (lam 2 2) (omega (1 2 3)))"), "{text}");
}

#[test]
fn malformed_input_is_a_usage_error() {
    let out = chiral(&["compute", "d", "--input", &input("malformed.sexp")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(":2:1:"));
    assert_eq!(chiral(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(chiral(&["compute", "d"]).status.code(), Some(2));
}

#[test]
fn propagator_is_certified_non_exact() {
    let out = chiral(&["certify-nonexact", "--input", &input("propagator.sexp")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("PASS"));
}
