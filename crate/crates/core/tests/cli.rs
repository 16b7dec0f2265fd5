use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nearfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearfield"))
        .args(args)
        .output()
        .unwrap()
}

fn run_small(dir: &Path) -> Output {
    nearfield(&[
        "run",
        "--out",
        dir.to_str().unwrap(),
        "--trials",
        "3",
        "--seed",
        "11",
        "--schemes",
        "FarField,CIDFT,PerfectCSI",
    ])
}

#[test]
fn unknown_config_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[array]\nn_antenas = 256\n").unwrap();
    let out = nearfield(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("n_antenas"), "{stderr}");
    assert!(!dir.path().join("trials.csv").exists());
}

#[test]
fn out_of_range_value_names_its_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[sweep]\ntrials = 0\n").unwrap();
    let out = nearfield(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.trials"));
}

#[test]
fn same_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_small(a.path()).status.success());
    assert!(run_small(b.path()).status.success());
    for name in ["trials.csv", "aggregate.csv", "overhead.csv", "config.toml"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let trials = fs::read_to_string(a.path().join("trials.csv")).unwrap();
    let mut lines = trials.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_value,scheme,trial,rate_bps_hz,pilots,d_sin_err,d_range_err_m")
    );
    assert_eq!(lines.count(), 8 * 3 * 3);
}

#[test]
fn saved_config_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_small(a.path()).status.success());
    let saved = a.path().join("config.toml");
    let out = nearfield(&[
        "run",
        "--config",
        saved.to_str().unwrap(),
        "--out",
        b.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read(a.path().join("trials.csv")).unwrap(),
        fs::read(b.path().join("trials.csv")).unwrap()
    );
}

#[test]
fn overhead_table_lists_pilot_counts() {
    let out = nearfield(&["overhead"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["scheme", "formula", "value"]);
    let value = |name: &str| rows.iter().find(|r| r[0] == name).map(|r| r[2]).unwrap();
    assert_eq!(value("Exhaustive"), "1776");
    assert_eq!(value("Hierarchical"), "1250");
    assert_eq!(value("FarField"), "222");
    assert_eq!(value("CIDFT"), "222");
}

#[test]
fn codebook_export_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("polar");
    let out = nearfield(&[
        "codebook",
        "--kind",
        "polar",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let meta = fs::read_to_string(dir.path().join("polar.csv")).unwrap();
    let entries = fs::read_to_string(dir.path().join("polar.entries.csv")).unwrap();
    assert_eq!(meta.lines().count(), entries.lines().count() + 1);
    assert!(entries.lines().all(|l| l.split(',').count() == 2 * 256));
    assert!(meta
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("polar")));
}

#[test]
fn table_file_round_trips_through_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    assert!(nearfield(&["table", "--out", table.to_str().unwrap()])
        .status
        .success());
    let first = fs::read(&table).unwrap();
    let run = dir.path().join("run");
    let out = nearfield(&[
        "run",
        "--out",
        run.to_str().unwrap(),
        "--trials",
        "1",
        "--schemes",
        "CIDFT",
        "--table-cache",
        table.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read(&table).unwrap(), first);
}
