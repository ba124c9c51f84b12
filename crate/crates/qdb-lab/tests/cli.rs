//! CLI contract: subcommand outputs, golden files, exit codes, and
//! byte-level reproducibility.

use std::process::{Command, Output};

fn qdb_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdb-lab"))
        .args(args)
        .env_remove("QDB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn table1_matches_golden_bytes() {
    let out = qdb_lab(&["table1"]);
    assert!(out.status.success());
    let golden = include_str!("golden/table1.csv");
    assert_eq!(stdout(&out), golden);
}

#[test]
fn tradeoff_matches_golden_bytes() {
    let out = qdb_lab(&["tradeoff"]);
    assert!(out.status.success());
    let golden = include_str!("golden/tradeoff_default.csv");
    assert_eq!(stdout(&out), golden);
}

#[test]
fn tradeoff_accepts_a_custom_grid() {
    let out = qdb_lab(&["tradeoff", "--u-grid", "0.9,0.95,1.0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.900,151,18245,"));
    assert!(lines[3].starts_with("1.000,80,416,"));
}

#[test]
fn size_reproduces_strict_threshold_rounds() {
    let out = qdb_lab(&["size", "--u", "1", "--p", "0.875", "--target-log2", "-80"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("n_required = 416"), "{text}");

    let out = qdb_lab(&["size", "--u", "1", "--p", "0.5", "--target-log2", "-80"]);
    assert!(stdout(&out).contains("n_required = 80"));

    let out = qdb_lab(&[
        "size",
        "--n",
        "1000",
        "--p-df",
        "0.5",
        "--p-mf",
        "0.875",
        "--eps-prime",
        "0.05",
    ]);
    assert!(stdout(&out).contains("tau = 925"));

    let out = qdb_lab(&["size", "--u", "0.9"]);
    assert!(stdout(&out).contains("eta_max = 0.105572809000"));
}

#[test]
fn bounds_evaluates_tails() {
    let out = qdb_lab(&["bounds", "--n", "80", "--tau", "80", "--p", "0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("chernoff_upper_log2 = -80.0000"), "{text}");
    assert!(
        text.contains("binomial_exact_upper_log2 = -80.0000"),
        "{text}"
    );
}

#[test]
fn simulate_reports_oracle_and_rates() {
    let out = qdb_lab(&[
        "simulate", "--attack", "mf", "--n", "200", "--tau", "0", "--trials", "20", "--seed", "9",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["exact_round_oracle"].as_f64().unwrap(), 0.875);
    let rate = doc["per_round_accept"]["rate"].as_f64().unwrap();
    assert!((rate - 0.875).abs() < 0.05);
}

#[test]
fn simulate_output_is_byte_reproducible() {
    let args = [
        "simulate", "--attack", "df", "--n", "64", "--tau", "40", "--trials", "50", "--seed",
        "123", "--format", "csv",
    ];
    let a = qdb_lab(&args);
    let b = qdb_lab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn trace_writes_transcript_and_log() {
    let dir = std::env::temp_dir().join(format!("qdb_trace_{}", std::process::id()));
    let out = qdb_lab(&[
        "trace",
        "--attack",
        "honest",
        "--n",
        "8",
        "--tau",
        "8",
        "--seed",
        "4",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let transcript = std::fs::read_to_string(dir.join("transcript.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&transcript).unwrap();
    assert_eq!(doc["transcript"]["decision"], "accept");
    assert_eq!(doc["transcript"]["rounds"].as_array().unwrap().len(), 8);

    let log = std::fs::read_to_string(dir.join("messages.jsonl")).unwrap();
    assert!(log.lines().count() >= 8 * 2 + 2);
    for line in log.lines() {
        let msg: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(msg["arrival_time"].as_f64().unwrap() >= msg["emit_time"].as_f64().unwrap());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn out_dir_env_var_sets_default_directory() {
    let dir = std::env::temp_dir().join(format!("qdb_envdir_{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_qdb-lab"))
        .args(["table1", "--out", "t1.csv"])
        .env("QDB_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("t1.csv").is_file());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        vec!["simulate", "--no-such-flag", "1"],
        vec!["simulate", "--attack", "quantum-leap"],
        vec!["nonsense"],
        vec!["size"],
        vec!["simulate", "--n", "not-a-number"],
        // Fraud strategies need a prover beyond the bound.
        vec!["simulate", "--attack", "df", "--distance", "100"],
        vec!["bounds", "--n", "80", "--tau", "80", "--p", "1.5"],
    ] {
        let out = qdb_lab(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn regime_errors_exit_3() {
    for args in [
        // Upper tail with tau <= n*p is vacuous.
        vec![
            "bounds", "--n", "100", "--tau", "40", "--p", "0.5", "--side", "upper",
        ],
        // Sizing with u <= p.
        vec!["size", "--u", "0.5", "--p", "0.5", "--target-log2", "-80"],
        // Noise budget outside (1/2, 1).
        vec!["size", "--u", "0.4"],
        // Adversaries are modeled noiselessly.
        vec!["simulate", "--attack", "mf", "--eta", "0.1"],
        vec!["trace", "--attack", "df", "--eta", "0.1"],
    ] {
        let out = qdb_lab(&args);
        assert_eq!(out.status.code(), Some(3), "args {args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let out = qdb_lab(&["help"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("SUBCOMMANDS"));
}
