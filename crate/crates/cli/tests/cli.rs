//! End-to-end checks of the `vanish` binary: subcommand behaviour, exit
//! codes, side files, and byte-identical reports for identical configs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn vanish(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vanish"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        !out.stdout.is_empty(),
        "no stdout; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("vanish-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn list_enumerates_catalog() {
    let out = vanish(&["list"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let entries = v["result"]["entries"].as_array().unwrap();
    assert!(entries.len() >= 10);
    let labels: Vec<&str> = entries
        .iter()
        .map(|e| e["label"].as_str().unwrap())
        .collect();
    for expected in [
        "segre:2x3",
        "veronese:3",
        "pluecker:5",
        "rnc:4",
        "elliptic:4",
    ] {
        assert!(labels.contains(&expected), "missing {expected}");
    }
}

#[test]
fn bound_reports_both_bounds() {
    let out = vanish(&["bound", "segre:3x4"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["degree_sum_bound"], 1);
    assert_eq!(v["result"]["strategy_bound"], -1);

    let out = vanish(&["bound", "pluecker:6"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["degree_sum_bound"], -2);
    assert_eq!(v["result"]["strategy_bound"], -3);

    let out = vanish(&["bound", "rnc:3"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["strategy_bound"], 1);
}

#[test]
fn verify_exit_codes_track_verdicts() {
    let pass = vanish(&["verify", "segre:2x2", "-e", "-1", "-k", "4", "--pad", "6"]);
    assert_eq!(pass.status.code(), Some(0));
    let v = stdout_json(&pass);
    assert_eq!(v["result"]["verdict"], "pass");

    // an over-optimistic threshold candidate must fail with exit code 1
    let fail = vanish(&["verify", "segre:2x2", "-e", "-2", "-k", "2", "--pad", "6"]);
    assert_eq!(fail.status.code(), Some(1));
    let v = stdout_json(&fail);
    assert_eq!(v["result"]["verdict"], "fail");
    assert!(!v["result"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn verify_writes_csv_table() {
    let csv = tmp("table.csv");
    let out = vanish(&[
        "verify",
        "rnc:3",
        "-e",
        "1",
        "-k",
        "1",
        "--pad",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,p,i,dim\n"));
    assert!(text.lines().count() > 5);
    std::fs::remove_file(&csv).ok();
}

#[test]
fn reports_are_byte_identical_for_same_config() {
    for args in [
        vec!["bound", "veronese:4"],
        vec!["optimize", "--case", "segre:3x4"],
        vec![
            "verify",
            "elliptic:4",
            "-e",
            "1",
            "-k",
            "1",
            "--pad",
            "2",
            "--seed",
            "9",
        ],
        vec!["curve-bound", "--genus", "10", "--degree", "5"],
    ] {
        let a = vanish(&args);
        let b = vanish(&args);
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
    }
}

#[test]
fn discrepancy_and_optimize_agree() {
    let out = vanish(&["discrepancy", "--case", "veronese:4", "--mults", "1,1,1"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["verdict"], "lc");
    assert_eq!(v["result"]["e_bound"], 0);
    assert_eq!(v["result"]["f_class"], "9H-6E");

    let out = vanish(&["optimize", "--case", "veronese:4"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["report"]["e_bound"], 0);

    // constraint violations are reported as errors
    let bad = vanish(&["discrepancy", "--case", "veronese:4", "--mults", "1,1,2"]);
    assert_ne!(bad.status.code(), Some(0));
}

#[test]
fn curve_bound_outputs_region_and_classes() {
    let csv = tmp("region.csv");
    let out = vanish(&[
        "curve-bound",
        "--genus",
        "10",
        "--degree",
        "5",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["guaranteed_degree_threshold"], 10);
    assert_eq!(v["result"]["exception_region"]["empty"], false);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("k,p_min_failing,p_max_failing\n"));
    std::fs::remove_file(&csv).ok();

    let out = vanish(&["curve-bound", "--genus", "1", "--degree", "5"]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["exception_region"]["empty"], true);
    assert_eq!(v["result"]["low_genus_bound"], 1);
}

#[test]
fn skewform_normalize_and_roundtrip() {
    let input = tmp("family.json");
    let family = serde_json::json!({
        "dim": 4,
        "field": "fp:32003",
        "truncation": 8,
        "entries": [
            [[0], [1], [0], [0]],
            [[-1], [0], [0], [0]],
            [[0], [0], [0], [0, 1]],
            [[0], [0], [0, -1], [0]]
        ]
    });
    std::fs::write(&input, serde_json::to_string(&family).unwrap()).unwrap();

    let out = vanish(&["skewform", "normalize", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["data"]["ranks"], serde_json::json!([2, 2]));
    let wedges = v["result"]["wedge_limits"].as_array().unwrap();
    assert_eq!(wedges.len(), 2);
    assert_eq!(wedges[1]["valuation"], 1);

    let out = vanish(&["skewform", "roundtrip", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["identity"], true);

    let out = vanish(&[
        "skewform",
        "omega",
        "--input",
        input.to_str().unwrap(),
        "-r",
        "2",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(
        v["result"]["omega"][0]["indices"],
        serde_json::json!([0, 1, 2, 3])
    );
    std::fs::remove_file(&input).ok();
}

#[test]
fn config_file_with_flag_overrides() {
    let cfg = tmp("config.json");
    std::fs::write(
        &cfg,
        serde_json::json!({ "field": "fp:101", "seed": 5 }).to_string(),
    )
    .unwrap();
    let out = vanish(&["--config", cfg.to_str().unwrap(), "bound", "segre:2x2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["config"]["field"], "fp:101");
    assert_eq!(v["config"]["seed"], 5);

    // flags override the file
    let out = vanish(&[
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "7",
        "bound",
        "segre:2x2",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["config"]["seed"], 7);
    std::fs::remove_file(&cfg).ok();

    let bad = vanish(&["--field", "fp:9", "list"]);
    assert_ne!(bad.status.code(), Some(0));
}

#[test]
fn unknown_label_is_an_error() {
    let out = vanish(&["bound", "mystery:7"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown catalog label"));
}
