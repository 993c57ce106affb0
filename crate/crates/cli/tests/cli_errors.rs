//! Driver error paths: every failure names the offending input.

use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_zetalab")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("zl_err_{}_{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn mellin_without_moments_names_the_missing_artifact() {
    let dir = tmp("missing");
    let out = Command::new(bin())
        .args(["mellin", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("moments.csv"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tmp("badkey");
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "jitter = 3\n").unwrap();
    let out = Command::new(bin())
        .args(["sample", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("jitter"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn empty_sample_range_is_rejected() {
    let dir = tmp("range");
    let out = Command::new(bin())
        .args([
            "sample",
            "--out",
            dir.to_str().unwrap(),
            "--t0",
            "10",
            "--t1",
            "5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("t0") && err.contains("t1"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn report_names_every_missing_stage() {
    let dir = tmp("stages");
    let out = Command::new(bin())
        .args(["report", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for stage in ["checks_sample.csv", "checks_moments.csv", "checks_mellin.csv", "checks_spectral.csv"] {
        assert!(err.contains(stage), "stderr missing {stage}: {err}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bad_spectral_file_carries_the_row_number() {
    let dir = tmp("spectral");
    let data = dir.join("bad.csv");
    std::fs::write(
        &data,
        "kappa,alpha,h_half,parity\n9.0,1.0,1.0,1\n9.5,1.0,-0.25,1\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args([
            "spectral",
            "--out",
            dir.to_str().unwrap(),
            "--spectral-data",
            data.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3") && err.contains("h_half"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}
