use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wva-sql"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sha256(path: &Path) -> String {
    let bytes = fs::read(path).unwrap();
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Data lines of a CSV as `(x, y...)` rows, skipping `#` headers and the column line.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn figure_one_matches_golden_hashes() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), &["distribution"]).status.success());
    assert!(run_in(dir.path(), &["distribution", "--normalized"]).status.success());
    let expected = fs::read_to_string(golden("fig1.sha256")).unwrap();
    for line in expected.lines() {
        let (hash, name) = line.split_once("  ").unwrap();
        assert_eq!(sha256(&dir.path().join(name)), hash, "{name}");
    }
}

#[test]
fn figure_three_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), &["squeeze"]).status.success());
    for label in ["coherent", "angles_0_0", "angles_pi_pi", "angles_0_pi"] {
        let name = format!("fig3_{label}.csv");
        assert_eq!(
            fs::read(dir.path().join(&name)).unwrap(),
            fs::read(golden(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        assert!(run_in(dir.path(), &["distribution", "--theta", "2e-3", "--phi", "3e-4"]).status.success());
        assert!(run_in(dir.path(), &["noise", "--I-sweep", "0.1:10:11"]).status.success());
    }
    for name in ["fig1a_curve.csv", "noise.json", "noise_sweep.csv"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn zero_angles_give_dark_port() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["distribution", "--theta", "0", "--phi", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let data = rows(&dir.path().join("fig1a_curve.csv"));
    assert!(!data.is_empty());
    assert!(data.iter().all(|r| r[1] == 0.0));
}

#[test]
fn unsqueezed_curves_collapse_to_reference() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), &["squeeze", "--r", "0", "--I-sweep", "0.1:10:21"]).status.success());
    for label in ["coherent", "angles_0_0", "angles_pi_pi", "angles_0_pi"] {
        for r in rows(&dir.path().join(format!("fig3_{label}.csv"))) {
            let want = 0.5 * (1.0 / r[0] + r[0]);
            assert!((r[1] / want - 1.0).abs() < 1e-9, "{label}: {r:?}");
        }
    }
}

#[test]
fn noise_reports_fiducial_numbers() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["noise"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("ell_sql = 7.26"), "{out}");
    assert!(out.contains("I = 1.13"), "{out}");
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("noise.json")).unwrap()).unwrap();
    assert!(report.is_object());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn noise_rejects_strong_coupling() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["noise", "--phi", "1e-4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn optimize_finds_squeezed_floor() {
    let dir = TempDir::new().unwrap();
    let o = run_in(dir.path(), &["squeeze", "--optimize", "--I-sweep", "0.1:10:5"]);
    assert!(o.status.success());
    let opt: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("optimum.json")).unwrap()).unwrap();
    let min = opt["rs2_min"].as_f64().unwrap();
    assert!((min / (-2f64).exp() - 1.0).abs() < 1e-6, "{min}");
}

#[test]
fn verify_passes_and_fails_on_impossible_tolerance() {
    let dir = TempDir::new().unwrap();
    let ok = run_in(dir.path(), &["verify", "--mc-pulses", "2000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(dir.path().join("verify.json").exists());
    assert!(dir.path().join("mc_manifest.json").exists());

    let strict = TempDir::new().unwrap();
    let bad = run_in(strict.path(), &["verify", "--mc-pulses", "1000", "--strict", "1e-16"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("params.toml");
    fs::write(&cfg, "theta = 1e-3\nbogus = 4\n").unwrap();
    let o = run_in(dir.path(), &["noise", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_values_are_used() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("params.toml");
    fs::write(&cfg, "theta = 2e-3\nphi = 3e-4\n").unwrap();
    assert!(run_in(dir.path(), &["distribution", "--config", cfg.to_str().unwrap()]).status.success());
    let from_flags = TempDir::new().unwrap();
    assert!(run_in(from_flags.path(), &["distribution", "--theta", "2e-3", "--phi", "3e-4"]).status.success());
    assert_eq!(
        fs::read(dir.path().join("fig1a_curve.csv")).unwrap(),
        fs::read(from_flags.path().join("fig1a_curve.csv")).unwrap()
    );
}

#[test]
fn json_format_writes_tables() {
    let dir = TempDir::new().unwrap();
    assert!(run_in(dir.path(), &["squeeze", "--format", "json", "--I-sweep", "0.1:10:3"]).status.success());
    let t: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("fig3_angles_0_pi.json")).unwrap()).unwrap();
    assert_eq!(t["columns"], serde_json::json!(["I", "Rs2"]));
    let v = t["rows"][1][1].as_f64().unwrap();
    assert!((v / (-2f64).exp() - 1.0).abs() < 1e-12);
}
