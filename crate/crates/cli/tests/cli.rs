use std::process::{Command, Output};

use num::BigUint;
use serde_json::Value;

fn tietze(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tietze"))
        .args(args)
        .output()
        .expect("run tietze")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
        .unwrap_or_else(|| panic!("no {key}"))
}

#[test]
fn approx_examples() {
    for (expr, k, want) in [
        ("1/3 + 1/6", "8", "1/2"),
        ("0", "0", "0"),
        ("1*1", "4", "1"),
        ("3 * 1/3", "20", "1"),
    ] {
        let out = tietze(&["approx", "--expr", expr, "--k", k]);
        assert!(out.status.success(), "{expr}");
        assert_eq!(stdout(&out).trim(), want, "{expr}");
    }
}

#[test]
fn parse_errors_exit_one_with_column() {
    let out = tietze(&["approx", "--expr", "1 + x", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 5"));
    assert_eq!(tietze(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        tietze(&["refute", "--candidate", "nope"]).status.code(),
        Some(1)
    );
}

#[test]
fn step_cap_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_tietze"))
        .args(["refute", "--candidate", "const0"])
        .env("TIETZE_STEP_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn refute_examples() {
    let out = tietze(&["refute", "--candidate", "const0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        (field(&text, "f_value"), field(&text, "extender_value")),
        ("1", "0")
    );

    let out = tietze(&["refute", "--candidate", "crn-const:1/2"]);
    let text = stdout(&out);
    assert_eq!(
        (field(&text, "f_value"), field(&text, "extender_value")),
        ("0", "1")
    );

    let out = tietze(&["refute", "--candidate", "parity"]);
    let text = stdout(&out);
    let witness: BigUint = field(&text, "witness").parse().unwrap();
    let parity = (witness % 2u8).to_string();
    assert_eq!(field(&text, "extender_value"), parity);
    assert_ne!(field(&text, "f_value"), parity);
}

#[test]
fn enumerate_edge_cases() {
    let out = tietze(&["enumerate", "--max-index", "0", "--max-budget", "10"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let runs: Vec<_> = (0..2)
        .map(|_| tietze(&["enumerate", "--max-index", "50", "--max-budget", "200"]).stdout)
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn json_lines_round_trip() {
    let out = tietze(&[
        "--format",
        "json-lines",
        "enumerate",
        "--max-index",
        "100",
        "--max-budget",
        "500",
    ]);
    let records = json_lines(&out);
    assert!(!records.is_empty());
    for r in &records {
        let back: Value = serde_json::from_str(&r.to_string()).unwrap();
        assert_eq!(&back, r);
        assert!(r["index"].is_string() && r["budget"].is_u64());
    }
    let out = tietze(&["--format", "json-lines", "refute", "--candidate", "parity"]);
    let rec = &json_lines(&out)[0];
    assert_eq!(rec["candidate"], "parity");
    assert_eq!(
        rec["f_value"].as_u64().unwrap() + rec["extender_value"].as_u64().unwrap(),
        1
    );
}

#[test]
fn demo_is_deterministic_in_both_formats() {
    let a = tietze(&["demo"]);
    let b = tietze(&["demo"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("g(u) = 0, g(v) = 1"));

    let j = tietze(&["--format", "json-lines", "demo"]);
    assert!(j.status.success());
    let records = json_lines(&j);
    let stages: Vec<&str> = records.iter().filter_map(|r| r["stage"].as_str()).collect();
    for s in ["agreement", "induce_h", "refute", "verify"] {
        assert!(stages.contains(&s), "missing stage {s}");
    }
    let verify = records.iter().find(|r| r["stage"] == "verify").unwrap();
    assert_eq!(verify["replay_ok"], true);
    assert_eq!(verify["fresh_simulation_ok"], true);
    assert_eq!(tietze(&["--format", "json-lines", "demo"]).stdout, j.stdout);
}

#[test]
fn check_space_verdicts() {
    let out = tietze(&[
        "check-space",
        "--set",
        "1,2,3",
        "--terms",
        "3,1,2,2,2",
        "--stabilization",
        "2",
    ]);
    assert!(out.status.success());
    let out = tietze(&[
        "--format",
        "json-lines",
        "check-space",
        "--set",
        "1,2",
        "--terms",
        "1,2,1",
        "--stabilization",
        "1",
    ]);
    assert_eq!(json_lines(&out)[0]["verdict"], "NotStabilized");
    let out = tietze(&[
        "check-space",
        "--set",
        "1,2",
        "--terms",
        "1",
        "--disjoint-from",
        "2,3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
