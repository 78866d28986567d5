use std::path::Path;
use std::process::{Command, Output};

const RUNNING_PAIR: &str = r#"{"min_poly": [-2, 0, 1], "form_diagonal": [["1"], ["1"], ["1"], ["1"], ["0", "-1"]]}"#;

fn orbicover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbicover")).args(args).output().expect("run orbicover")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn validate_reports_admissible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pair.json", RUNNING_PAIR);
    let out = orbicover(&["validate", &input]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("admissible, m=4"));
}

#[test]
fn definite_form_is_inadmissible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "def.json", r#"{"min_poly": [-2, 0, 1], "form_diagonal": [["1"], ["1"], ["1"]]}"#);
    assert_eq!(orbicover(&["validate", &input]).status.code(), Some(3));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "bad.json", "{not json");
    assert_eq!(orbicover(&["validate", &input]).status.code(), Some(2));
    assert_eq!(orbicover(&["validate", "/nonexistent/input.json"]).status.code(), Some(2));
}

#[test]
fn primes_lists_exclusions() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pair.json", RUNNING_PAIR);
    let out = orbicover(&["primes", &input, "--bound", "20", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.to_string().contains("dyadic"));
}

#[test]
fn certify_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pair.json", RUNNING_PAIR);
    let cert = dir.path().join("pair.cert.json");
    let cert = cert.to_str().unwrap();
    assert_eq!(orbicover(&["certify", &input, "--pair", "--out", cert]).status.code(), Some(0));
    let out = orbicover(&["verify", cert]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "pair.json", RUNNING_PAIR);
    let out = orbicover(&["certify", &input, "--prime", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    v[0]["cover_prime"]["ell"] = "3".into();
    let cert = write(dir.path(), "tampered.json", &v.to_string());
    assert_eq!(orbicover(&["verify", &cert]).status.code(), Some(1));
}

#[test]
fn orders_prints_factored_form() {
    let out = orbicover(&["orders", "--dim", "5", "--p", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("7^4·(7^2-1)·(7^4-1)"), "{}", stdout(&out));
}

#[test]
fn orders_even_dimension_needs_square_class() {
    assert_eq!(orbicover(&["orders", "--dim", "4", "--p", "3"]).status.code(), Some(2));
    let out = orbicover(&["orders", "--dim", "4", "--p", "3", "--square-class", "nonsquare", "--oracle", "brute"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("720"), "{}", stdout(&out));
}
