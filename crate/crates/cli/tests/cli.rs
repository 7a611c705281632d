use std::path::Path;
use std::process::{Command, Output};

fn spat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spat"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn spat")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = spat(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn simulate_fit_predict_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--cycles", "1000", "--seed", "7", "-o", "a.csv"]);
    ok(d, &["simulate", "--cycles", "1000", "--seed", "7", "-o", "b.csv"]);
    let a = std::fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b.csv")).unwrap());
    assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 1001);

    let fit = ok(d, &["fit", "-i", "a.csv"]);
    assert_eq!(fit, ok(d, &["fit", "-i", "b.csv"]));
    let predict = ["predict", "-i", "a.csv", "--phase", "p4", "--t", "36"];
    let first = ok(d, &predict);
    assert_eq!(first, ok(d, &predict));
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert!(v["predicted_duration"].as_f64().unwrap() > 36.0);
    assert_eq!(v["degraded"], false);
}

#[test]
fn alpha_out_of_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = spat(
        dir.path(),
        &["predict", "-i", "x.csv", "--phase", "p4", "--t", "1", "--alpha", "1.5"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spat(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(spat(dir.path(), &["emit", "--cadence-ms", "5"]).status.code(), Some(2));
}

#[test]
fn bad_data_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(spat(d, &["fit", "-i", "missing.csv"]).status.code(), Some(1));
    std::fs::write(
        d.join("bad.csv"),
        "cycle_index,cycle_start_ms,L_s,d4_s,d1_s,d2_s,d8_s,d5_s,d6_s\n0,0,120,36,0,84,40,0,80\n",
    )
    .unwrap();
    let out = spat(d, &["fit", "-i", "bad.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn ingest_reproduces_simulated_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "simulate", "--cycles", "200", "--seed", "3", "-o", "c.csv", "--events", "e.csv",
        ],
    );
    ok(d, &["ingest", "-i", "e.csv", "-o", "back.csv"]);
    assert_eq!(
        std::fs::read(d.join("c.csv")).unwrap(),
        std::fs::read(d.join("back.csv")).unwrap()
    );
}

#[test]
fn evaluate_writes_comparison_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--cycles", "500", "--seed", "1", "-o", "c.csv"]);
    let csv = ok(
        d,
        &[
            "evaluate",
            "-i",
            "c.csv",
            "--compare",
            "expectation,confidence:0.8",
            "--metric",
            "mae",
            "--plot-data",
            "p.csv",
        ],
    );
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,predictor,metric,value,n"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows[0].starts_with("0.00,expectation,mae,"));
    assert!(rows[1].starts_with("0.00,confidence:0.8,mae,"));
    assert_eq!(rows.len() % 2, 0);
    assert!(std::fs::read_to_string(d.join("p.csv"))
        .unwrap()
        .starts_with("lower,upper,probability,cdf\n"));

    let all = ok(d, &["evaluate", "-i", "c.csv", "--loo", "--quantity", "d4+d1"]);
    let t0: Vec<&str> = all.lines().filter(|l| l.starts_with("0.00,")).collect();
    assert_eq!(t0.len(), 3);
}

#[test]
fn emit_stream_is_reproducible_ndjson() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--cycles", "20", "--seed", "9", "-o", "c.csv"]);
    let a = ok(d, &["emit", "-i", "c.csv", "--cadence-ms", "500"]);
    assert_eq!(a, ok(d, &["emit", "-i", "c.csv", "--cadence-ms", "500"]));
    assert_eq!(a.lines().count(), 20 * 240 * 2);
    for line in a.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let f = |k: &str| v[k].as_f64().unwrap();
        assert!(f("startTime") <= f("minEndTime"));
        assert!(f("minEndTime") <= f("likelyTime") && f("likelyTime") <= f("maxEndTime"));
        assert!(f("minEndTime") >= f("made_at"));
    }
}

#[test]
fn windowed_fit_uses_previous_days() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--days", "3", "--seed", "2", "-o", "c.csv"]);
    let v: serde_json::Value =
        serde_json::from_str(&ok(d, &["fit", "-i", "c.csv", "--day", "2", "--delta", "14"])).unwrap();
    assert_eq!(v["samples"], 1440);
    let out = spat(d, &["fit", "-i", "c.csv", "--day", "0", "--delta", "14"]);
    assert_eq!(out.status.code(), Some(1));
}
