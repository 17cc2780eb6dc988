//! End-to-end checks of the `arclab` binary: output formats, round-trips,
//! determinism, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arclab"))
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
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("arclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

#[test]
fn weight_mangoldt_q2_alternates() {
    let csv = stdout(&["weight", "--model", "mangoldt", "--q", "2", "--n", "16"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,re,im"));
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], (k + 1).to_string());
        let re: f64 = fields[1].parse().unwrap();
        let im: f64 = fields[2].parse().unwrap();
        let expect = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((re - expect).abs() < 1e-12 && im.abs() < 1e-12, "row {line}");
    }
}

#[test]
fn sieve_csv_round_trips_exactly() {
    let path = scratch("divisor50.csv");
    let out = run(&[
        "sieve", "--model", "divisor", "--n", "50", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = arclab::Series::read_csv("tau", text.as_bytes()).unwrap();
    let direct = arclab::sieve::divisor_series::<f64>(50).unwrap();
    assert_eq!(parsed.start, direct.start);
    assert_eq!(parsed.values, direct.values);
}

#[test]
fn gowers_brute_and_fft_agree_via_files() {
    let path = scratch("ramp.csv");
    let out = run(&[
        "sieve", "--model", "two-squares", "--n", "40", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&[
        "gowers", "--s", "2", "--input", path.to_str().unwrap(), "--method", "both",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let brute: f64 = results[0]["raw_power"].as_str().unwrap().parse().unwrap();
    let fft: f64 = results[1]["raw_power"].as_str().unwrap().parse().unwrap();
    assert!((brute - fft).abs() <= 1e-8 * brute.abs().max(1.0));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let args = [
        "--deterministic", "--seed", "7",
        "ergodic", "--n", "2000",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["--deterministic", "weight", "--model", "two-squares", "--q", "6", "--n", "500"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let cfg = scratch("defaults.cfg");
    std::fs::write(&cfg, "n = 8 # window\nq = 3\n").unwrap();
    let csv = stdout(&["--config", cfg.to_str().unwrap(), "sieve", "--model", "divisor"]);
    assert_eq!(csv.lines().count(), 9); // header + 8 rows
    let csv = stdout(&[
        "--config", cfg.to_str().unwrap(), "sieve", "--model", "divisor", "--n", "4",
    ]);
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn sieve_cache_is_written_and_reused() {
    let dir = scratch("cache");
    let _ = std::fs::remove_dir_all(&dir);
    let run_cached = || {
        let out = bin()
            .env("ARITH_LAB_CACHE", &dir)
            .args(["sieve", "--model", "mangoldt", "--n", "30"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run_cached();
    assert!(dir.join("mangoldt_30.csv").is_file());
    assert_eq!(first, run_cached());
}

#[test]
fn exit_codes_follow_error_classes() {
    // missing required value -> argument error
    let out = run(&["sieve", "--model", "divisor"]);
    assert_eq!(out.status.code(), Some(2));
    // domain violation -> argument error
    let out = run(&["ps", "--c", "0.5", "--n", "100"]);
    assert_eq!(out.status.code(), Some(2));
    // unreadable input file -> io, reported as capacity-class exit 1
    let out = run(&["gowers", "--s", "2", "--input", "/nonexistent/f.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["spectra", "--n", "64", "--q", "4", "--i", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn spectra_reports_zero_nesting_violations() {
    let text = stdout(&["spectra", "--n", "256", "--q", "6", "--i", "3", "--s", "1"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["nesting_violations"], 0);
    assert!(!v["intervals"].as_array().unwrap().is_empty());
}
