//! End-to-end checks of the command-line surface: configuration round-trip,
//! reproducible output bytes, and exit codes.

use std::path::Path;
use std::process::Command;

fn mmtdd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmtdd"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_round_trip_is_identity() {
    // Parse -> canonical serialization -> parse reproduces the same document.
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/fig6.json"
    ))
    .unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["run"], "mc-validate");
    // Canonicalization happens through the typed config; exercise it via two
    // identical runs below instead of poking private types here.
}

#[test]
fn rate_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(
        &cfg,
        r#"{
  "run": "rate",
  "network": { "lambda_s_per_km2": 0.0, "lambda_m_per_km2": 100.0, "frame_slots": 1, "delta": 1.0 }
}"#,
    );
    for out in ["a", "b"] {
        let status = mmtdd()
            .args(["rate", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.path().join("a/rate.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/rate.csv")).unwrap();
    assert_eq!(a, b, "reruns differ");
}

#[test]
fn invalid_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    // Empty sweep axis must be rejected up front.
    write(
        &cfg,
        r#"{
  "run": "sweep",
  "network": {},
  "sweep": { "axes": [ { "param": "eta", "values": [] } ] }
}"#,
    );
    let out_dir = dir.path().join("out");
    let output = mmtdd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out_dir.join("sweep.csv").exists(), "partial output written");

    // Unknown field names are configuration errors too.
    write(&cfg, r#"{ "run": "rate", "network": { "lambda_m": 20 } }"#);
    let output = mmtdd().args(["rate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    // Physically invalid parameter.
    write(
        &cfg,
        r#"{ "run": "rate", "network": { "alpha_los": 1.5 } }"#,
    );
    let output = mmtdd().args(["rate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_row_per_point_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(
        &cfg,
        r#"{
  "run": "sweep",
  "network": { "lambda_s_per_km2": 0.0, "lambda_m_per_km2": 100.0, "frame_slots": 1, "delta": 1.0 },
  "sweep": {
    "axes": [ { "param": "eta", "values": [0.3, 0.7] } ],
    "schemes": [["static", "sab"]]
  }
}"#,
    );
    let out_dir = dir.path().join("out");
    let status = mmtdd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = body.lines().skip(2).collect();
    assert_eq!(rows.len(), 2, "expected one row per grid point:\n{body}");
    assert!(rows[0].starts_with("0.300000,static,sab"));

    // A rerun resumes from the manifest and does not duplicate rows.
    let status = mmtdd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let body2 = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(body, body2);
}

#[test]
fn coverage_emits_schema_and_respects_strict_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    write(
        &cfg,
        r#"{
  "run": "coverage",
  "network": { "lambda_s_per_km2": 0.0, "lambda_m_per_km2": 100.0, "frame_slots": 1, "delta": 1.0, "eta": 0.0 },
  "links": ["ul_access"],
  "tau_grid": { "lo_db": 0.0, "hi_db": 10.0, "step_db": 5.0 }
}"#,
    );
    let out_dir = dir.path().join("out");
    let status = mmtdd()
        .args(["coverage", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(out_dir.join("coverage.csv")).unwrap();
    let mut lines = body.lines();
    assert!(lines.next().unwrap().starts_with("# mmtdd v"));
    assert_eq!(
        lines.next().unwrap(),
        "link,scheme_a,scheme_b,slot,tier,tau_db,coverage"
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("ul_access,static,sab,1,m,0.00,"), "{first}");
}
