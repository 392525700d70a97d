//! End-to-end checks of the command-line interface, run against the
//! compiled binary.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rainbow-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn theory_emits_the_exact_expectation() {
    let text = stdout(&["theory", "--n", "3", "--d", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["hamilton"]["e_y"]["fraction"], "384/385");
    // the reduced form of 10368/10395
    let decimal = v["hamilton"]["e_y"]["decimal"].as_f64().unwrap();
    assert!((decimal - 10368.0 / 10395.0).abs() < 1e-12);
    // the matching analogue at the same (n, d)
    assert_eq!(v["matching"]["e_z"]["fraction"], "65536/33649");
}

#[test]
fn sample_and_search_round_trip() {
    let dir = std::env::temp_dir().join("rainbow_lab_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("instance.json");
    let text = stdout(&[
        "sample", "--n", "8", "--d", "8", "--seed", "4",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(text.is_empty());
    let direct = stdout(&["search", "--n", "8", "--d", "8", "--seed", "4"]);
    let loaded = stdout(&["search", "--input", path.to_str().unwrap()]);
    let a: serde_json::Value = serde_json::from_str(&direct).unwrap();
    let b: serde_json::Value = serde_json::from_str(&loaded).unwrap();
    assert_eq!(a["count"], b["count"]);
    assert_eq!(a["count"], a["traffic_count"]);
}

#[test]
fn census_csv_has_header_and_rows() {
    let text = stdout(&[
        "census", "--n", "12", "--d", "4", "--seed", "1", "--i-max", "3", "--format", "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,count"));
    assert_eq!(text.lines().count(), 1 + 2 + 3 + 4);
}

#[test]
fn experiment_output_is_reproducible_across_threads() {
    fn args(threads: &str) -> Vec<&str> {
        vec![
            "experiment", "--model", "hamilton", "--n", "12", "--d", "8",
            "--trials", "600", "--seed", "5", "--i-max", "2",
            "--stats", "x:1:0,x:2:1,fm:1:0:2", "--threads", threads,
        ]
    }
    let a = stdout(&args("1"));
    let b = stdout(&args("4"));
    let c = stdout(&args("8"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    // The environment default must route through the same machinery.
    let out = bin()
        .args(args("2")[..args("2").len() - 2].to_vec())
        .env("RAINBOW_LAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), a);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["estimates"][0]["stat"], "mean_x_1_0");
    // Round trip through the schema.
    let again = serde_json::to_string(&v).unwrap();
    let w: serde_json::Value = serde_json::from_str(&again).unwrap();
    assert_eq!(v, w);
}

#[test]
fn experiment_attaches_theory_references() {
    let text = stdout(&[
        "experiment", "--model", "matching", "--n", "2", "--d", "7",
        "--trials", "200", "--seed", "1", "--i-max", "1", "--stats", "z",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["theory"][0]["stat"], "mean_z");
    assert_eq!(v["theory"][0]["exact"]["fraction"], "16807/2925");
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["search"]); // no input and no sizes
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_parameters_exit_two() {
    let out = run(&[
        "experiment", "--model", "hamilton", "--n", "3", "--d", "4", "--trials", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["census", "--n", "3", "--d", "5", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["oracle", "--n", "4", "--d", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surface_report_recovers_the_maximiser() {
    let text = stdout(&[
        "variance", "--d", "8", "--surface", "--grid", "500", "--threads", "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let s = &v["surface"];
    assert!((s["f_star"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((s["alpha_star"].as_f64().unwrap() - 3.0 / 14.0).abs() < 1e-4);
    assert!((s["delta_star"].as_f64().unwrap() - 0.75).abs() < 1e-4);
    assert!((s["laplace_limit"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(s["hessian"]["c1"]["fraction"], "-178/45");
}

#[test]
fn oracle_json_has_exact_census_means() {
    let text = stdout(&["oracle", "--n", "3", "--d", "4", "--i-max", "2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["e_y"]["fraction"], "384/385");
    let rows = v["e_x"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["i"] == 1 && r["j"] == 0 && r["mean"]["fraction"] == "18/11"));
}
