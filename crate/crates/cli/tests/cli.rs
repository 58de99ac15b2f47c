use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn hproof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hproof")).args(args).output().unwrap()
}

fn check(args: &[&str]) -> (i32, String) {
    let mut all = vec!["check"];
    all.extend_from_slice(args);
    let out = hproof(&all);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn cantor_is_proved() {
    let (code, out) = check(&[&path("cantor.tla"), "--prove"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "PROVED");
    assert_eq!(v["leaves"].as_array().unwrap().len(), 11);
}

#[test]
fn omitted_proofs_are_incomplete() {
    let (code, out) = check(&[&path("cantor_omitted.tla"), "--format", "text"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("cantor_omitted: INCOMPLETE"));
}

#[test]
fn take_on_conjunction_is_meaningless() {
    let (code, out) = check(&[&path("take_on_conj.tla"), "--format", "text"]);
    assert_eq!(code, 3);
    assert!(out.contains("error: <1>1 (2:1): meaningless: no rule matches TAKE x"), "{out}");
}

#[test]
fn parse_errors_and_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tla");
    std::fs::write(&bad, "THEOREM a\n<1>1. QED OBVIOUS\n  <3>1. a").unwrap();
    let (code, out) = check(&[bad.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(out.contains("\"status\": \"MEANINGLESS\""));
    let out = hproof(&["check", dir.path().join("missing.tla").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.tla"));
}

#[test]
fn worst_status_wins_across_files() {
    let (code, out) = check(&[&path("cantor.tla"), &path("cantor_omitted.tla"), &path("take_on_conj.tla")]);
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let statuses: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["PROVED", "INCOMPLETE", "MEANINGLESS"]);
}

#[test]
fn output_is_independent_of_worker_count() {
    let a = check(&[&path("cantor.tla"), &path("corpus/cases.tla"), "--jobs", "1"]);
    let b = check(&[&path("cantor.tla"), &path("corpus/cases.tla"), "--jobs", "4"]);
    assert_eq!(a, b);
}

#[test]
fn selective_proving() {
    let (code, out) = check(&[&path("cantor.tla"), "--only", "<1>1.<2>2.<3>1", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("cantor: CHECKED (11 leaves: 5 proved, 0 omitted, 0 unknown, 0 malformed, 6 skipped)"), "{out}");
    let (code, out) = check(&[&path("cantor.tla"), "--check-only", "--format", "text"]);
    assert_eq!(code, 0);
    assert!(out.contains("11 skipped"));
}

#[test]
fn listing_and_embeddings() {
    let (code, out) = check(&[&path("cantor.tla"), "--list"]);
    assert_eq!(code, 0);
    assert!(out.contains("[1] <1>1.<2>2.<3>1.<4>1 obvious-goal\n    ASSUME NEW S, NEW f"));
    let (_, out) = check(&[&path("cantor.tla"), "--embeddings"]);
    assert_eq!(out.lines().count(), 11);
    assert_eq!(
        out.lines().next().unwrap(),
        "!!S. !!f. (f \\in [S -> SUBSET S]) ==> !!x. (x \\in S) ==> (x \\in {z \\in S : z \\notin f[z]}) ==> f[x] # {z \\in S : z \\notin f[z]}"
    );
}

#[test]
fn emitted_files() {
    let dir = tempfile::tempdir().unwrap();
    let traces = dir.path().join("traces");
    let emb = dir.path().join("emb.txt");
    let report = dir.path().join("report.json");
    let (code, out) = check(&[
        &path("cantor.tla"),
        "--emit-traces",
        traces.to_str().unwrap(),
        "--emit-embeddings",
        emb.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_dir(&traces).unwrap().count(), 11);
    assert!(std::fs::read_to_string(traces.join("cantor-1.trace")).unwrap().contains("close"));
    assert_eq!(std::fs::read_to_string(&emb).unwrap().lines().count(), 11);
    assert!(std::fs::read_to_string(&report).unwrap().contains("\"status\": \"PROVED\""));
}

#[test]
fn hidden_local_definitions_fail() {
    let (code, out) = check(&[&path("cantor.tla"), "--local-defs-usable", "false", "--timeout-ms", "300", "--format", "text"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.starts_with("cantor: FAILED"));
}

#[test]
fn invalid_budget() {
    let out = hproof(&["check", &path("cantor.tla"), "--depth", "0"]);
    assert_eq!(out.status.code(), Some(4));
}
