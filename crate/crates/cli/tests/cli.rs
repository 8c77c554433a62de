//! End-to-end CLI tests: golden files on a fixed five-node graph, help
//! synopses, determinism, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mtensor")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden {path:?}: {e}"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("failed to spawn mtensor")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn five(rest: &[&str]) -> Vec<String> {
    let mut args = vec![
        rest[0].to_string(),
        "--input".to_string(),
        data("five.txt").to_string_lossy().into_owned(),
        "--directed".to_string(),
        "--weighted".to_string(),
    ];
    args.extend(rest[1..].iter().map(|s| s.to_string()));
    args
}

fn check_golden(rest: &[&str], golden_name: &str) {
    let args = five(rest);
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = stdout_of(&argv);
    assert_eq!(
        out,
        golden(golden_name),
        "golden mismatch for {golden_name} (command {argv:?})"
    );
}

#[test]
fn golden_tensor_slices() {
    check_golden(&["tensor"], "tensor.csv");
}

#[test]
fn golden_tensor_quads() {
    check_golden(&["tensor", "--quads"], "tensor_quads.csv");
}

#[test]
fn golden_hitting_pairwise() {
    check_golden(&["hitting"], "hitting_pairwise.json");
}

#[test]
fn golden_hitting_with_targets() {
    check_golden(&["hitting", "--targets", "e"], "hitting_target_e.json");
}

#[test]
fn golden_commute() {
    check_golden(&["commute"], "commute.json");
}

#[test]
fn golden_kirchhoff() {
    check_golden(&["kirchhoff"], "kirchhoff.json");
}

#[test]
fn golden_centrality() {
    check_golden(&["centrality"], "centrality.json");
}

#[test]
fn golden_articulation() {
    check_golden(&["articulation"], "articulation.json");
}

#[test]
fn golden_load_csv() {
    check_golden(&["load", "--format", "csv"], "load.csv");
}

#[test]
fn golden_influence_greedy() {
    check_golden(&["influence", "--k", "2", "--method", "c2greedy"], "influence_greedy.json");
}

#[test]
fn golden_influence_pagerank_curve() {
    check_golden(
        &["influence", "--k", "3", "--method", "pagerank", "--format", "csv"],
        "influence_pagerank.csv",
    );
}

#[test]
fn golden_reach_single_query() {
    check_golden(&["reach", "--query", "a", "e", "--failed", "c"], "reach_single.txt");
}

#[test]
fn golden_reach_batch() {
    let batch = data("queries.txt").to_string_lossy().into_owned();
    check_golden(&["reach", "--batch", &batch], "reach_batch.txt");
}

#[test]
fn golden_reach_oracle_dump() {
    check_golden(&["reach", "--dump-oracle"], "reach_oracle.csv");
}

#[test]
fn golden_simulate() {
    check_golden(
        &["simulate", "--start", "a", "--targets", "e", "--walks", "20000", "--seed", "7"],
        "simulate.json",
    );
}

#[test]
fn golden_relations() {
    check_golden(&["relations"], "relations.json");
}

#[test]
fn identical_runs_are_byte_identical() {
    for rest in [
        vec!["centrality"],
        vec!["simulate", "--start", "b", "--targets", "d,e", "--walks", "5000", "--seed", "11"],
        vec!["influence", "--k", "3", "--method", "random", "--seed", "42"],
    ] {
        let args = five(&rest);
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = stdout_of(&argv);
        let b = stdout_of(&argv);
        assert_eq!(a, b, "non-deterministic output for {argv:?}");
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let base = five(&["simulate", "--start", "a", "--targets", "e", "--walks", "50000", "--seed", "3"]);
    let mut capped = base.clone();
    capped.extend(["--threads".to_string(), "1".to_string()]);
    let a = stdout_of(&base.iter().map(String::as_str).collect::<Vec<_>>());
    let b = stdout_of(&capped.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(a, b);
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "tensor",
        "hitting",
        "commute",
        "kirchhoff",
        "centrality",
        "articulation",
        "load",
        "influence",
        "reach",
        "simulate",
        "relations",
    ] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("Usage"), "{sub} --help lacks a usage line");
        assert!(text.contains("--input"), "{sub} --help lacks --input");
    }
}

#[test]
fn chain_failure_query_prints_zero() {
    let dir = std::env::temp_dir().join("mtensor-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let chain = dir.join("path3.txt");
    std::fs::write(&chain, "a b\nb c\n").unwrap();
    let out = stdout_of(&[
        "reach",
        "--input",
        &chain.to_string_lossy(),
        "--directed",
        "--query",
        "a",
        "c",
        "--failed",
        "b",
    ]);
    assert_eq!(out, "0\n");
}

#[test]
fn missing_direction_flag_is_rejected() {
    let input = data("five.txt").to_string_lossy().into_owned();
    let out = run(&["kirchhoff", "--input", &input, "--weighted"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_validation_code() {
    let dir = std::env::temp_dir().join("mtensor-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "a b c d e f\n").unwrap();
    let out = run(&[
        "kirchhoff",
        "--input",
        &bad.to_string_lossy(),
        "--directed",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "error should name the line: {err}");
}

#[test]
fn tensor_cap_rejects_materialization_above_max_n() {
    let args = five(&["hitting", "--max-n", "2"]);
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run(&argv);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("max-n"), "error should mention the cap: {err}");
}

#[test]
fn non_strongly_connected_tensor_is_validation_error() {
    let dir = std::env::temp_dir().join("mtensor-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let chain = dir.join("chain.txt");
    std::fs::write(&chain, "a b\nb c\nc c\n").unwrap();
    let out = run(&[
        "kirchhoff",
        "--input",
        &chain.to_string_lossy(),
        "--directed",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_file_receives_output() {
    let dir = std::env::temp_dir().join("mtensor-cli-out");
    std::fs::create_dir_all(&dir).unwrap();
    let target = dir.join("k.json");
    let _ = std::fs::remove_file(&target);
    let args = five(&["kirchhoff", "--out", &target.to_string_lossy()]);
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let stdout = stdout_of(&argv);
    assert!(stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), golden("kirchhoff.json"));
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = std::env::temp_dir().join("mtensor-cli-envdir");
    std::fs::create_dir_all(&dir).unwrap();
    let args = five(&["kirchhoff", "--out", "env_k.json"]);
    let out = Command::new(bin())
        .args(args.iter().map(String::as_str))
        .env("MTENSOR_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(dir.join("env_k.json")).unwrap(),
        golden("kirchhoff.json")
    );
}
