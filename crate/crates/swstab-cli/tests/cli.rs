use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn reference_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/reference.toml")
}

fn swstab(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swstab"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn bundle(out: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn variant(dir: &Path, from: &str, to: &str) -> PathBuf {
    let text = std::fs::read_to_string(reference_config()).unwrap();
    assert!(text.contains(from));
    let path = dir.join("variant.toml");
    std::fs::write(&path, text.replace(from, to)).unwrap();
    path
}

#[test]
fn check_constants_reports_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["check-constants"], &reference_config(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = bundle(dir.path(), "check-constants");
    assert_eq!(v["version"], 1);
    assert_eq!(v["command"], "check-constants");
    let r = &v["result"];
    assert!((r["kappa"].as_f64().unwrap() - 11.136655993663428).abs() < 1e-9);
    assert!((r["upsilon_star"].as_f64().unwrap() - 0.1113665599).abs() < 1e-9);
    assert!((r["smallness_margin"].as_f64().unwrap() - 0.5545337602534626).abs() < 1e-9);
    assert_eq!(r["holds"], true);
    assert!(dir.path().join("check-constants.timings.json").exists());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("check-constants:"));
}

#[test]
fn analyze_sw_reference_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["analyze-sw"], &reference_config(), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &bundle(dir.path(), "analyze-sw")["result"];
    assert_eq!(r["n_L"], 3);
    assert_eq!(r["N_Cplus"], 2);
    assert_eq!(r["dim_ker"], 3);
    assert_eq!(r["unstable_modes"], serde_json::json!([1, -1]));
}

#[test]
fn analyze_sw_out_of_regime_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "gamma = 0.1", "gamma = 0.2");
    let o = swstab(&["analyze-sw"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("smallness"));
    let r = &bundle(dir.path(), "analyze-sw")["result"];
    assert_eq!(r["in_proven_regime"], false);
}

#[test]
fn analyze_hartree_is_stable_at_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["analyze-hartree"], &reference_config(), dir.path());
    assert!(o.status.success());
    let r = &bundle(dir.path(), "analyze-hartree")["result"];
    assert_eq!(r["spectrally_stable"], true);
    assert!(r["coercivity"].is_object());
}

#[test]
fn roots_reference() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["roots"], &reference_config(), dir.path());
    assert!(o.status.success());
    let r = &bundle(dir.path(), "roots")["result"];
    assert!((r["a_star"].as_f64().unwrap() - 0.019924687273125363).abs() < 1e-9);
    assert_eq!(r["unstable_modes"], serde_json::json!([1, -1]));
}

#[test]
fn simulate_writes_trace_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["simulate"], &reference_config(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &bundle(dir.path(), "simulate")["result"];
    assert!(r["mass_drift"].as_f64().unwrap() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("simulate_trace.csv")).unwrap();
    assert!(csv.starts_with("t,h_sw,h_ha,l2_mass"));
    assert_eq!(csv.lines().count(), r["samples"].as_u64().unwrap() as usize + 1);
    let chk = swstab::io::read_checkpoint(&dir.path().join("simulate_final.chk")).unwrap();
    assert!((chk.0.t - 5.0).abs() < 1e-9);
}

#[test]
fn growth_and_limit_c() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["growth"], &reference_config(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = &bundle(dir.path(), "growth")["result"];
    assert!(g["relative_gap"].as_f64().unwrap() < 0.05);
    let o = swstab(&["limit-c"], &reference_config(), dir.path());
    assert!(o.status.success());
    let l = &bundle(dir.path(), "limit-c")["result"];
    assert_eq!(l["rows"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("limit-c_rows.csv").exists());
}

#[test]
fn csv_only_skips_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = swstab(&["simulate", "--format", "csv"], &reference_config(), dir.path());
    assert!(o.status.success());
    assert!(!dir.path().join("simulate.json").exists());
    assert!(dir.path().join("simulate_trace.csv").exists());
}

#[test]
fn bad_config_exits_1_with_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "n = 3", "n = 2");
    let o = swstab(&["check-constants"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("error:") && err.contains("coupling.n"), "{err}");
}

#[test]
fn missing_config_exits_1() {
    let o = Command::new(env!("CARGO_BIN_EXE_swstab")).arg("roots").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_thread_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let files = ["roots.json", "limit-c.json", "limit-c_rows.csv"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        for cmd in ["roots", "limit-c"] {
            let o = swstab(&[cmd, "--threads", "1", "--format", "both"], &reference_config(), dir.path());
            assert!(o.status.success());
        }
        let contents: Vec<String> = files
            .iter()
            .map(|f| std::fs::read_to_string(dir.path().join(f)).unwrap())
            .collect();
        runs.push(contents);
    }
    for (i, f) in files.iter().enumerate() {
        assert!(runs[0][i] == runs[1][i], "{f} differs between runs");
    }
}
