//! End-to-end checks of the `ris-csm` binary: exit codes, file output,
//! and byte-identical results across thread counts.

use std::process::Command;

use ris_csm_sim::output::{parse_csv, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ris-csm"))
}

const CONFIG: &str = r#"
[system]
elements = 16
patterns_per_group = 4

[sweep]
metric = "per-group-ser"
snr = "0:10:5"
trials = 2000
min_errors = 50
seed = 3
"#;

fn write_config(dir: &tempfile::TempDir) -> std::path::PathBuf {
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, CONFIG).unwrap();
    path
}

#[test]
fn missing_metric_is_a_config_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("sweep.metric"), "{stderr}");
}

#[test]
fn unreadable_config_is_a_config_error() {
    let out = bin().args(["--config", "/nonexistent/exp.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_flag_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir);
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--snr", "5:0:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir);
    let out = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(CSV_HEADER));
    let records = parse_csv(&stdout).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.scheme == "ris-csm" && r.metric == "per-group-ser"));

    let file = dir.path().join("out.csv");
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--out", file.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&file).unwrap(), stdout);
}

#[test]
fn output_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir);
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let file = dir.path().join(format!("out{threads}.csv"));
        let out = bin()
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--threads",
                threads,
                "--out",
                file.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        outputs.push(std::fs::read(&file).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir);
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: Vec<ris_csm_sim::sweep::Record> =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json.len(), 3);

    // CSV and JSON come from the same records
    let csv_out = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    let csv = parse_csv(&String::from_utf8(csv_out.stdout).unwrap()).unwrap();
    assert_eq!(json, csv);
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir);
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--metric", "analytic-bound", "--snr", "0:0:1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let records = parse_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].metric, "analytic-bound");
    assert_eq!(records[0].trials, 0);
}
