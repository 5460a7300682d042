use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chargesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chargesim"))
        .args(args)
        .output()
        .unwrap()
}

fn demo(dir: &Path, preset: &str) -> String {
    let path = dir.join(format!("{preset}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = chargesim(&["gen-demo", "--preset", preset, "--out", &p]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    p
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo(dir.path(), "default");
    let out_dir = dir.path().join("out");
    let out = chargesim(&[
        "run",
        "-c",
        &cfg,
        "--seed",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "summary.json",
        "customers.csv",
        "stations.csv",
        "arrival_rates.csv",
    ] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("social_welfare"), "{stdout}");
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo(dir.path(), "dense");
    let out = chargesim(&[
        "sweep",
        "-c",
        &cfg,
        "--multipliers",
        "0.5,1,2",
        "-r",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("multiplier,"));
}

#[test]
fn validate_reports_erlang_c() {
    let out = chargesim(&["validate", "--arrivals", "200000"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.92857"), "{stdout}");

    let out = chargesim(&["validate", "--lambda", "3", "--servers", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unstable"));
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo(dir.path(), "default");
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replacen("\"chargers\": ", "\"chargers\": -", 1);
    fs::write(&cfg, text).unwrap();
    let out = chargesim(&[
        "run",
        "-c",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stations[0].chargers"), "{err}");

    let out = chargesim(&["run", "-c", "/definitely/missing.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}
