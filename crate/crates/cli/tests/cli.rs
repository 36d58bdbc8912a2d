use std::process::{Command, Output};

use serde_json::Value;

fn tablewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tablewalk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_body(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sample_zero_steps_is_zero_table() {
    let o = tablewalk(&["sample", "--n", "3", "--q", "2", "--steps", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["table"]["entries"], serde_json::json!([[0, 0, 0], [0, 0, 0], [0, 0, 0]]));
    assert_eq!(v["header"]["seed"], 1);
}

#[test]
fn sample_default_budget_is_t_upper() {
    let o = tablewalk(&["sample", "--n", "3", "--q", "2", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let t_upper = v["header"]["params"]["theorem_times"]["t_upper"].as_f64().unwrap();
    assert_eq!(v["header"]["params"]["steps"].as_u64().unwrap(), t_upper.ceil() as u64);
    let rows = v["table"]["entries"].as_array().unwrap();
    for r in rows {
        let s: u64 = r.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
        assert_eq!(s % 2, 0);
    }
}

#[test]
fn sample_n2_warns() {
    let o = tablewalk(&["sample", "--n", "2", "--q", "5", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("requires n >= 4"));
    assert!(err.contains("known to not have cutoff"));
}

#[test]
fn sample_inconsistent_sums_exit_2() {
    let o = tablewalk(&["sample", "--n", "3", "--q", "2", "--row-sums", "1,0,0", "--col-sums", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn sample_trajectory_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.ndjson");
    let o = tablewalk(&[
        "sample", "--n", "5", "--q", "3", "--steps", "10", "--trajectory", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 11);
    assert_eq!(recs[0]["F_value"], 4.0);
    assert!(recs.iter().all(|r| r["state_digest"].as_str().unwrap().len() == 16));
}

#[test]
fn tv_curve_full_and_capped() {
    let o = tablewalk(&["tv-curve", "--n", "3", "--q", "2", "--t-max", "60", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_body(&stdout(&o));
    assert_eq!(rows[0], ["t", "exact_tv", "l2_bound", "mc_lower", "reason"]);
    assert_eq!(rows.len(), 62);
    for r in &rows[1..] {
        let exact: f64 = r[1].parse().unwrap();
        let l2: f64 = r[2].parse().unwrap();
        let mc: f64 = r[3].parse().unwrap();
        assert!(exact <= l2 + 1e-12 && mc <= exact + 0.02);
    }
    let o = tablewalk(&["tv-curve", "--n", "20", "--q", "2", "--t-max", "3", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_body(&stdout(&o));
    assert!(rows[1..].iter().all(|r| r[1].is_empty() && r[4] == "group too large"));
}

#[test]
fn tv_curve_reports_t_mix() {
    let o = tablewalk(&["tv-curve", "--n", "4", "--q", "2", "--t-max", "10", "--trials", "0"]);
    let text = stdout(&o);
    let params = text.lines().find(|l| l.starts_with("# params: ")).unwrap();
    let v: Value = serde_json::from_str(&params["# params: ".len()..]).unwrap();
    assert!(v["t_mix_quarter"].as_u64().is_some());
}

#[test]
fn cutoff_table_sweeps() {
    let o = tablewalk(&["cutoff-table", "--n", "3,4", "--q", "2,3"]);
    let rows = csv_body(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| !r[9].is_empty()));
    assert!(rows[1..].iter().filter(|r| r[0] == "4").all(|r| r[10] == "ok"));
    let o = tablewalk(&["cutoff-table", "--n", "10,20,50", "--q", "2"]);
    let rows = csv_body(&stdout(&o));
    assert!(rows[1..].iter().all(|r| r[9].is_empty()));
    let ratios: Vec<f64> = rows[1..].iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn verify_instance_and_mutant() {
    let o = tablewalk(&["verify", "--suite", "lemma3_2", "--exhaustive", "n=6", "q=2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reports"][0]["cases_checked"], 32);
    assert_eq!(v["passed"], true);
    let o = tablewalk(&["verify", "--suite", "spectral", "--mutant-flip-cosine", "1", "n=3", "q=3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
    assert!(!v["reports"][0]["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(tablewalk(&["spectrum", "--n", "6", "--q", "3"]).status.code(), Some(3));
    assert_eq!(tablewalk(&["verify", "--suite", "lemma3_5", "--exhaustive", "n=5", "q=3"]).status.code(), Some(3));
    assert_eq!(tablewalk(&["wilson", "--n", "3", "--q", "2"]).status.code(), Some(2));
    assert_eq!(tablewalk(&["tv-curve", "--n", "3"]).status.code(), Some(2));
    assert_eq!(tablewalk(&["verify", "n=3"]).status.code(), Some(2));
    assert_eq!(tablewalk(&["sample", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("o.csv");
    std::fs::write(&cfg, r#"{"n": 3, "q": 2, "seed": 99, "t_max": 4, "trials": 1000}"#).unwrap();
    let o = tablewalk(&["--config", cfg.to_str().unwrap(), "tv-curve", "--seed", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed: 5"));
    assert_eq!(csv_body(&text).len(), 6);
    std::fs::write(&cfg, r#"{"n": 3, "unknown": 1}"#).unwrap();
    let o = tablewalk(&["--config", cfg.to_str().unwrap(), "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectrum_and_distribution_exports() {
    let rows = csv_body(&stdout(&tablewalk(&["spectrum", "--n", "3", "--q", "2"])));
    assert_eq!(rows.len(), 17);
    assert_eq!(rows[1], ["0", "1"]);
    let rows = csv_body(&stdout(&tablewalk(&["distribution", "--n", "3", "--q", "3", "--steps", "4"])));
    let total: f64 = rows[1..].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    let o = tablewalk(&["spectrum", "--n", "3", "--q", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn wilson_csv_columns() {
    let o = tablewalk(&["wilson", "--n", "6", "--q", "3", "--t-max", "20", "--t-step", "10", "--trials", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_body(&stdout(&o));
    assert_eq!(rows[0], ["t", "tv_lower_estimate", "wilson_guarantee", "trials"]);
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r[3] == "1000"));
}
