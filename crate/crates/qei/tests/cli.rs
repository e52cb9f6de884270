use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qei"))
        .args(args)
        .env_remove("QEI_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Cheap campaigns; the growth fit of the Bochner checks needs `J = 256`.
const SMALL: &str = r#"{
    "seed": 11,
    "catalog": {"J": 256},
    "states": [{"kind": "pair", "mode": 1, "epsilon": [0.1, 0.0]}],
    "windows": [{"center": 0.0, "width": 0.6, "amplitude": 1.0}],
    "positions": [0.0, 1.0],
    "campaigns": ["q_step", "quiescence", "bochner"],
    "sizes": {"bochner_samples": 8}
}"#;

#[test]
fn empty_campaign_list_exits_zero_with_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 3, "campaigns": []}"#);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("verify-all.json"));
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["criteria"].as_array().unwrap().len(), 0);
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
    assert!(dir.path().join("verify-all.metadata.json").exists());
}

#[test]
fn mode_beyond_catalog_is_a_field_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"seed": 3, "catalog": {"J": 4}, "states": [{"kind": "pair", "mode": 9, "epsilon": [0.1, 0.0]}]}"#,
    );
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "qwei"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("states[0].mode"), "{err}");
    assert!(!dir.path().join("qwei.json").exists());
}

#[test]
fn missing_seed_and_bad_tolerance_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"campaigns": []}"#);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let cfg = write_config(dir.path(), r#"{"seed": 1, "tolerances": {"work": -1.0}}"#);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerances.work"));

    let out = qei(&["--config", dir.path().join("absent.json").to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out_dir, threads) in [(&a, "1"), (&b, "3")] {
        let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap(), "--threads", threads, "qwei"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let ra = fs::read(a.join("qwei.json")).unwrap();
    let rb = fs::read(b.join("qwei.json")).unwrap();
    assert_eq!(ra, rb);
    for table in ["q_function.csv", "qwei_margins.csv"] {
        assert_eq!(fs::read(a.join(table)).unwrap(), fs::read(b.join(table)).unwrap(), "{table}");
    }
    let text = String::from_utf8(ra).unwrap();
    assert!(!text.contains("elapsed"));
    let meta = read_json(&b.join("qwei.metadata.json"));
    assert_eq!(meta["threads"], Value::from(3));
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["criteria"].as_array().unwrap().len(), 3);
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 3, "campaigns": []}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_qei"))
        .args(["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "verify-all"])
        .env("QEI_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("verify-all.metadata.json"))["threads"], Value::from(2));
}

#[test]
fn every_reported_number_carries_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "qwei"]);
    assert_eq!(out.status.code(), Some(0));
    let report = read_json(&dir.path().join("qwei.json"));
    let mut checks: Vec<&Value> = report["checks"].as_array().unwrap().iter().collect();
    for c in report["criteria"].as_array().unwrap() {
        checks.extend(c["checks"].as_array().unwrap());
    }
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["measured"]["value"].is_number(), "{c}");
        assert!(c["measured"]["error"].as_f64().unwrap() >= 0.0, "{c}");
    }
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 5, "campaigns": ["q_step"], "tolerances": {"q_oracle": 1e-300}}"#);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL]  2 q_step"), "{stdout}");
    assert_eq!(read_json(&dir.path().join("verify-all.json"))["passed"], Value::Bool(false));
}

#[test]
fn modes_table_layout_and_csv_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 2, "catalog": {"J": 5, "G": 16}, "campaigns": []}"#);
    let csv = dir.path().join("catalog.csv");
    let report = dir.path().join("r.json");
    let out = qei(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "modes",
        "--csv",
        csv.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..4], ["j", "n", "omega", "re_u_0"]);
    assert_eq!(header.len(), 3 + 2 * 16);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    let ns: Vec<&str> = rows.iter().map(|r| &r[1]).collect();
    assert_eq!(ns, ["0", "1", "-1", "2", "-2"]);
    let omega2: f64 = rows[3][2].parse().unwrap();
    assert!((omega2 - 5f64.sqrt()).abs() <= 1e-15);
    assert!(dir.path().join("r.metadata.json").exists());
    assert_eq!(read_json(&report)["tables"][0], Value::from(csv.display().to_string()));
}

#[test]
fn state_flag_replaces_configured_states() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 2, "catalog": {"J": 16}, "campaigns": []}"#);
    let args = |state: &'static str| {
        qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "twopoint", "--state", state])
    };
    let out = args(r#"{"kind":"squeezed","modes":[[1,0.3,0.0]]}"#);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("twopoint.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("squeezed")));

    let out = args(r#"{"kind":"nonsense"}"#);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--state[0]"));

    let out = args(r#"{"kind":"pair","mode":40,"epsilon":[0.1,0.0]}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fan_file_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 2, "campaigns": []}"#);
    let fan = dir.path().join("fan.json");
    fs::write(&fan, "[[0.0, 0.0, 0.0, 0.0]]").unwrap();
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "microlocal", "--fan", fan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--fan"));

    fs::write(&fan, "[[1.0, 0.0, -1.0, 0.0]]").unwrap();
    let out = qei(&["--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "microlocal", "--fan", fan.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seed_flag_overrides_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"seed": 2, "campaigns": []}"#);
    let out = qei(&["--config", cfg.to_str().unwrap(), "--seed", "99", "--out-dir", dir.path().to_str().unwrap(), "verify-all"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&dir.path().join("verify-all.json"))["seed"], Value::from(99));
}
