use std::path::Path;
use std::process::{Command, Output};

use pw_amalgam::config::ExperimentConfig;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pw-amalgam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'), "LF line endings only");
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn verify_family_default_gaussian_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", r#"{"family": {"id": "gaussian"}}"#);
    let out = dir.path().join("out");
    let o = run(&[
        "verify-family",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let rows = csv_rows(&out.join("regularity.csv"));
    let header = &rows[0];
    assert_eq!(
        &header[..4],
        ["alpha", "delta_estimate", "m_alpha", "h2_ratio"]
    );
    assert_eq!(
        &header[header.len() - 4..],
        ["pass_A2", "pass_A3", "pass_H2", "pass_H3"]
    );
    assert!(header[4].starts_with("h3_ratio_at_"));
    assert_eq!(rows.len(), 7);
    for row in &rows[1..] {
        assert!(row[row.len() - 4..].iter().all(|v| v == "true"));
    }
    assert!(out.join("manifest.json").exists());
}

#[test]
fn poisson_h2_ratio_stays_near_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"family": {"id": "poisson"}, "alpha_sweep": {"values": [1, 2, 4, 8]}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&[
        "verify-family",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out.join("regularity.csv"));
    for row in &rows[1..] {
        let h2: f64 = row[3].parse().unwrap();
        assert!((2.0..=2.01).contains(&h2), "{h2}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let kadec = write_config(
        dir.path(),
        "d.json",
        r#"{"family": {"id": "gaussian"}, "nodes": {"d": 0.3}}"#,
    );
    let o = run(&["sweep", "--config", &kadec]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Kadec"));

    let typo = write_config(
        dir.path(),
        "t.json",
        r#"{"family": {"id": "gaussian"}, "tolerances": {"solvr": 1e-9}}"#,
    );
    assert_eq!(
        run(&["verify-family", "--config", &typo]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("absent.json");
    assert_eq!(
        run(&["sweep", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["sweep"]).status.code(), Some(2));

    let multi = write_config(dir.path(), "m.json", r#"{"family": {"id": "gaussian"}}"#);
    let o = run(&[
        "reconstruct",
        "--config",
        &multi,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_flags_ill_conditioned_rows_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"values": [1.5, 2.5, 3.0]},
            "spatial": {"density": 8}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&out.join("convergence.csv"));
    assert_eq!(rows[0].len(), 10);
    assert_eq!(rows[0][8], "tail_slack_J");
    let flags: Vec<&str> = rows[1..].iter().map(|r| r[9].as_str()).collect();
    assert_eq!(flags, ["false", "false", "true"]);
    let cond: f64 = rows[3][6].parse().unwrap();
    assert!(cond > 1e12);
}

#[test]
fn zero_signal_sweep_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "z.json",
        r#"{"family": {"id": "gaussian"}, "signal": {"id": "zero"},
            "alpha_sweep": {"start": 0.5, "stop": 2.5, "count": 3}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(
        run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    for row in &csv_rows(&out.join("convergence.csv"))[1..] {
        assert!(row[1..6].iter().all(|v| v == "0.0"), "{row:?}");
    }
}

#[test]
fn reconstruct_writes_ordered_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.json",
        r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"values": [1.0]},
            "signal": {"id": "tri_band"}, "tolerances": {"solver": 1e-9}}"#,
    );
    let out = dir.path().join("out");
    let o = run(&[
        "reconstruct",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--eval-points",
        "2,-1.5,0,3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let points: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let xs: Vec<f64> = points
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["x"].as_f64().unwrap())
        .collect();
    assert_eq!(xs, [-1.5, 0.0, 2.0, 3.0]);
    // integer points are nodes of the default uniform set
    for p in points.as_array().unwrap() {
        if p["x"].as_f64().unwrap().fract() == 0.0 {
            assert!(p["error"].as_f64().unwrap() <= 1e-9);
        }
    }
    assert_eq!(
        std::fs::read(out.join("reconstruct.json")).unwrap(),
        o.stdout
    );

    let empty = run(&[
        "reconstruct",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--eval-points",
        "",
    ]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(
        serde_json::from_slice::<serde_json::Value>(&empty.stdout).unwrap(),
        serde_json::json!([])
    );
}

#[test]
fn manifest_echo_reproduces_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"family": {"id": "gaussian"}, "alpha_sweep": {"values": [1.0, 2.0]},
                   "nodes": {"N": 16, "d": 0.1, "seed": 3},
                   "signal": {"id": "two_band"}, "spatial": {"density": 6}}"#;
    let cfg = write_config(dir.path(), "e.json", text);
    let out = dir.path().join("out");
    assert_eq!(
        run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let echoed: ExperimentConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(echoed, ExperimentConfig::from_json(text).unwrap());
    assert_eq!(manifest["files"], serde_json::json!(["convergence.csv"]));

    // rerunning from the echo gives the same table
    let first = std::fs::read(out.join("convergence.csv")).unwrap();
    let cfg2 = write_config(dir.path(), "echo.json", &manifest["config"].to_string());
    let out2 = dir.path().join("out2");
    run(&["sweep", "--config", &cfg2, "--out", out2.to_str().unwrap()]);
    assert_eq!(std::fs::read(out2.join("convergence.csv")).unwrap(), first);
}

#[test]
fn list_signals_prints_the_catalog() {
    let o = run(&["list-signals"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for id in ["gauss_pair", "tri_band", "cauchy_decay", "two_band", "zero"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
}
