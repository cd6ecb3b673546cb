//! End-to-end checks of the binary: exit codes, CSV schema, file output.

use std::path::Path;
use std::process::{Command, Output};

fn aircomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aircomp"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

#[test]
fn solve_mse_prints_the_expected_solution() {
    let out = aircomp(&[
        "solve-mse",
        "--channels",
        "1,1,1,1,1,1,1,1,1,1",
        "--sum-power",
        "10",
        "--noise-var",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11, "header plus one row per sensor");
    assert!(lines[0].starts_with("sensor,h_k"));
    // g* = MSE* = 10/11, b_k = 1.
    assert!(lines[1].contains(",9.09090909e-1,9.09090909e-1,"));
    assert!(lines[1].starts_with("1,1.00000000e0,1.00000000e0,"));
    assert!(!text.contains('\r'), "LF line endings only");
}

#[test]
fn solve_mse_single_sensor_value() {
    let out = aircomp(&["solve-mse", "--channels", "1", "--sum-power", "10", "--noise-var", "1"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("9.09090909e-2"), "MSE* = 1/11");
}

#[test]
fn missing_required_flag_exits_2() {
    let out = aircomp(&["solve-mse", "--channels", "1", "--noise-var", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_figure_id_exits_2() {
    let out = aircomp(&["fig", "--which", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_without_matching_limit_flag_exits_2() {
    let out = aircomp(&["simulate", "--policy", "sum-power-mse", "--sensors", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("--power-per-sensor"), "stderr: {err}");
}

#[test]
fn domain_error_exits_1() {
    let out = aircomp(&["solve-power", "--channels", "1,1", "--mse-limit", "0", "--noise-var", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let neg = aircomp(&["solve-mse", "--channels", "1,-1", "--sum-power", "1", "--noise-var", "1"]);
    assert_eq!(neg.status.code(), Some(1));
}

#[test]
fn trivial_mse_limit_reports_zero_power_with_note() {
    let out = aircomp(&[
        "solve-power",
        "--channels",
        "1,1,1,1,1,1,1,1,1,1",
        "--mse-limit",
        "10",
        "--noise-var",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("trivial"));
    assert!(text.lines().nth(1).unwrap().contains(",0.00000000e0,trivial"));
}

#[test]
fn solve_power_reports_theorem_values() {
    let out = aircomp(&[
        "solve-power",
        "--channels",
        "1,1,1,1,1,1,1,1,1,1",
        "--mse-limit",
        "5",
        "--noise-var",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("1.58113883e0"), "g*: {row}");
    assert!(row.contains(",1.00000000e0,4.00000000e-1,1.00000000e0,"), "M, lambda2, PW*: {row}");
}

#[test]
fn out_dir_receives_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_flag = dir.path().to_str().unwrap();
    let out = aircomp(&[
        "solve-mse",
        "--channels",
        "0.5,1.5",
        "--sum-power",
        "4",
        "--noise-var",
        "2",
        "--out",
        out_flag,
        "--quiet",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).is_empty(), "--quiet suppresses stdout");

    let csv = std::fs::read_to_string(dir.path().join("solve_mse.csv")).unwrap();
    assert!(csv.starts_with("sensor,"));
    let manifest = std::fs::read_to_string(dir.path().join("solve_mse.manifest.txt")).unwrap();
    assert!(manifest.contains("subcommand: solve-mse"));
    assert!(manifest.contains("param.channels: 0.5,1.5"));
    assert!(manifest.contains("param.sum_power: 4"));
    assert!(manifest.contains("param.noise_var: 2"));
    assert!(manifest.contains("duration_ms:"));
}

#[test]
fn baseline_peak_respects_caps() {
    let out = aircomp(&[
        "baseline-peak",
        "--channels",
        "0.4,1.0,2.0",
        "--peak-power",
        "2",
        "--noise-var",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for line in text.lines().skip(1) {
        let power: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(power <= 2.0 * (1.0 + 1e-12), "cap violated: {line}");
    }
}

#[test]
fn simulate_emits_one_row_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out_dir: &Path| -> String {
        let out = aircomp(&[
            "simulate",
            "--policy",
            "sum-power-mse",
            "--sensors",
            "4",
            "--power-per-sensor",
            "10",
            "--trials",
            "500",
            "--seed",
            "42",
            "--out",
            out_dir.to_str().unwrap(),
            "--quiet",
        ]);
        assert!(out.status.success());
        std::fs::read_to_string(out_dir.join("simulate.csv")).unwrap()
    };
    let first = run(dir.path());
    assert_eq!(first.lines().count(), 2);
    assert!(first.lines().nth(1).unwrap().starts_with("sum_power_mse,4,500,"));
    let second = run(dir.path());
    assert_eq!(first, second);
}
