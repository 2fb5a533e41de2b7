use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn duality(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_duality"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn fixtures_run_quickly_and_cleanly() {
    for (file, cmds) in [
        ("triangular_exponential.json", &["eval", "sweep"][..]),
        ("target_update.json", &["update-target", "solve-gamma"][..]),
        ("dual_selection.json", &["eval", "matrix", "dominance"][..]),
        ("fund_allocation.json", &["matrix", "allocate", "delegate"][..]),
        ("second_order_approx.json", &["approx", "eval"][..]),
    ] {
        for cmd in cmds {
            let start = Instant::now();
            let out = duality(&[cmd, "--scenario", fixture(file).to_str().unwrap()]);
            assert!(
                out.status.success(),
                "{cmd} {file}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert!(
                start.elapsed() < Duration::from_secs(5),
                "{cmd} {file} took {:?}",
                start.elapsed()
            );
        }
    }
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(
        &p,
        r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "u", "kind": "uniform"}], "utilities": []}"#,
    )
    .unwrap();
    let out = duality(&["eval", "--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("utilities"));

    std::fs::write(&p, r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "u", "kind": "scaled_beta", "alpha": "two", "beta": 2}]}"#).unwrap();
    let out = duality(&["eval", "--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = duality(&["eval", "--scenario", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(
        &p,
        r#"{"domain": {"lo": 0, "hi": 1}, "lotteries": [{"name": "b", "kind": "scaled_beta", "alpha": 2, "beta": 2}], "params": {"target": 1.0}}"#,
    )
    .unwrap();
    let out = duality(&["solve-gamma", "--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_csv_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = duality(&[
        "sweep",
        "--scenario",
        fixture("triangular_exponential.json").to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,certain_equivalent,aspiration_equivalent"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1] + 1e-9 && w[1][2] <= w[0][2] + 1e-9);
    }
    // Symmetric lottery: both equivalents pass through the mean at gamma = 0.
    let zero = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((zero[1] - 100.0).abs() < 1e-6 && (zero[2] - 100.0).abs() < 1e-6);
}

#[test]
fn json_output_mirrors_update() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("u.json");
    let out = duality(&[
        "update-target",
        "--scenario",
        fixture("target_update.json").to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let up = &v["result"]["update"];
    for field in [
        "old_lottery",
        "new_lottery",
        "old_target",
        "effective_gamma",
        "new_target",
        "old_exceed_prob",
        "new_exceed_prob",
    ] {
        assert!(!up[field].is_null(), "missing {field}");
    }
    assert_eq!(v["result"]["round_trip"]["pass"], true);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("published values") && stdout.contains("WARNING: tolerance exceeded"));
}
