use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn lpdecay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpdecay"))
        .args(args)
        .env_remove("LPDECAY_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn transform_diamond_fixture() {
    let out = lpdecay(&["transform", "--p", "1", "--alpha", "3.14159265", "--beta", "6.28318531"]);
    assert!(out.status.success());
    let v = field(&stdout(&out), "value");
    assert!((v + 0.0430020).abs() < 1e-6, "{v}");
}

#[test]
fn transform_at_origin_is_area_over_two_pi() {
    let out = lpdecay(&["transform", "--p", "2", "--alpha", "0", "--beta", "0", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["method"], "zero-frequency");
    assert!(v["err_estimate"].is_number());
}

#[test]
fn transform_matches_two_dimensional_fixture() {
    let out = lpdecay(&["transform", "--p", "1.5", "--alpha", "3", "--beta", "4"]);
    let v = field(&stdout(&out), "value");
    assert!((v + 0.0641937416844065).abs() < 1e-9);
}

#[test]
fn invalid_inputs_are_usage_errors() {
    assert_eq!(lpdecay(&["transform", "--p", "2.5", "--alpha", "1", "--beta", "1"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["envelope", "--p", "1.5", "--r-min", "100", "--r-max", "10"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["envelope", "--p", "1.5", "--r-min", "1", "--r-max", "10"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["sequence", "--p", "2", "--n-max", "3"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["fit", "--p-list", "1.1,1.2"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(lpdecay(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn budget_failure_has_its_own_exit_code() {
    let out = lpdecay(&["--max-panels", "2", "transform", "--p", "1.5", "--alpha", "300", "--beta", "400"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn envelope_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("env.csv");
    let out = lpdecay(&[
        "envelope", "--p", "2", "--r-min", "50", "--r-max", "2000", "--per-decade", "40", "--thetas", "3",
        "--no-timestamp", "-o", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let c = summary["c_est"].as_f64().unwrap();
    assert!((c / (2.0 / std::f64::consts::PI).sqrt() - 1.0).abs() < 0.02, "{c}");
    assert!((summary["upper_bound"].as_f64().unwrap() - 14.270485380032657).abs() < 1e-9);
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["r_per_decade"], 40);
    assert!(summary.as_object().unwrap().values().all(|v| !v.is_object() && !v.is_array()));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# lpdecay 0.1.0"));
    assert_eq!(lines.next(), Some("# command: envelope"));
    let config: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["p"], 2.0);
    assert_eq!(lines.next(), Some("p,r,theta,scaled_value,err_estimate,method"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), summary["samples"].as_u64().unwrap() as usize);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 6);
        for c in &cols[..5] {
            c.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn envelope_output_is_reproducible_across_workers() {
    let args = |w: &'static str| {
        vec!["--workers", w, "--no-timestamp", "envelope", "--p", "1.3", "--r-max", "100", "--per-decade", "8", "--thetas", "6"]
    };
    let a = lpdecay(&args("1"));
    let b = lpdecay(&args("4"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_lpdecay"))
        .args(["--no-timestamp", "envelope", "--p", "1.3", "--r-max", "100", "--per-decade", "8", "--thetas", "6"])
        .env("LPDECAY_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn timestamp_line_is_optional() {
    let with = lpdecay(&["sequence", "--p", "1.5", "--n-min", "1", "--n-max", "2"]);
    assert!(stdout(&with).lines().any(|l| l.starts_with("# timestamp: ")));
    let without = lpdecay(&["--no-timestamp", "sequence", "--p", "1.5", "--n-min", "1", "--n-max", "2"]);
    let text = stdout(&without);
    assert!(!text.contains("timestamp"));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[3].starts_with("# v_of_p: 0.67561732"));
    assert_eq!(lines[4], "n,r_n,scaled_value,v_of_p,err_estimate");
    assert_eq!(lines.len(), 7);
    assert!(lines[5].starts_with("1,"));
}

#[test]
fn fit_summary_is_flat_json() {
    let out = lpdecay(&["fit", "--p-list", "1.05,1.1,1.2,1.3,1.4", "--n-ref", "200"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!((-0.56..=-0.44).contains(&slope), "{slope}");
    assert_eq!(v["points"], 5);
    assert_eq!(v["n_ref"], 200);
    assert!(v["max_abs_residual"].is_number());
}

#[test]
fn conjecture_reports_for_body_files() {
    let dir = tempfile::tempdir().unwrap();
    let body = dir.path().join("ellipse.json");
    fs::write(&body, r#"{"label":"wide","kind":"ellipse","params":{"a":2.0,"b":1.0}}"#).unwrap();
    let out = lpdecay(&["conjecture", "--body", body.to_str().unwrap(), "--r-max", "200", "--per-decade", "10", "--thetas", "7"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["label"], "wide");
    assert_eq!(v["kind"], "ellipse");
    assert!((v["nu"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((v["bound"].as_f64().unwrap() - 28.540970760065306).abs() < 1e-9);
    assert_eq!(v["upper_ok"], true);

    let lens = dir.path().join("lens.json");
    fs::write(
        &lens,
        r#"{"label":"lens","kind":"custom-poly-coeffs","params":{"upper":[1,0,-1],"lower":[-1,0,1],"x_range":[-1,1]}}"#,
    )
    .unwrap();
    let out = lpdecay(&["conjecture", "--body", lens.to_str().unwrap(), "--r-max", "100", "--per-decade", "6", "--thetas", "5"]);
    assert!(out.status.success());

    let flat = dir.path().join("diamond.json");
    fs::write(&flat, r#"{"label":"diamond","kind":"lp","params":{"p":1.0}}"#).unwrap();
    assert_eq!(lpdecay(&["conjecture", "--body", flat.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&flat, "not json").unwrap();
    assert_eq!(lpdecay(&["conjecture", "--body", flat.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_runs_named_suites() {
    let out = lpdecay(&["verify", "l1-sharpness"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("[PASS]  9 l1-sharpness"), "{text}");
}
