use std::process::{Command, Output};

use serde_json::Value;

fn fringe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fringe")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = fringe(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn exact_leaf_variance() {
    let o = fringe(&["exact", "--model", "bst", "--stat", "var-count", "--n", "10", "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("22/45"));
    let v = json(&["exact", "--model", "bst", "--stat", "var-count", "--n", "10", "--k", "1"]);
    assert_eq!(v["rows"][0]["estimate"], "22/45");
    assert_eq!(v["rows"][0]["verdict"], "INFO");
    assert!(v["config_hash"].as_str().is_some_and(|h| h.len() == 16));
}

#[test]
fn oracle_laws_are_exact_fractions() {
    let v = json(&["oracle", "--model", "rrt", "--n", "7", "--stat", "count", "--k", "2"]);
    assert_eq!(v["rows"][0]["estimate"], "7/6");
    let law = v["details"]["laws"]["7"].as_object().unwrap();
    let total: f64 = law
        .values()
        .map(|p| {
            let s = p.as_str().unwrap();
            match s.split_once('/') {
                Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
                None => s.parse().unwrap(),
            }
        })
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let cap = fringe(&["oracle", "--model", "bst", "--n", "11", "--stat", "count", "--k", "1"]);
    assert_eq!(cap.status.code(), Some(3));
    let bad_model = fringe(&["exact", "--model", "avl", "--stat", "var-count", "--n", "5", "--k", "1"]);
    assert_eq!(bad_model.status.code(), Some(2));
    assert_eq!(fringe(&["exact", "--bogus"]).status.code(), Some(2));
    let raised_cap = fringe(&["oracle", "--n", "5", "--stat", "count", "--k", "1", "--cap", "20"]);
    assert_eq!(raised_cap.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"model":"rrt","n":[7],"stat":["count"],"k":1}"#).unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["oracle", "--config", p]);
    assert_eq!(v["rows"][0]["model"], "rrt");
    assert_eq!(v["rows"][0]["n"], 7);
    let v = json(&["oracle", "--config", p, "--k", "2"]);
    assert_eq!(v["rows"][0]["estimate"], "7/6");
    std::fs::write(&path, r#"{"modle":"rrt"}"#).unwrap();
    assert_eq!(fringe(&["oracle", "--config", p]).status.code(), Some(2));
}

#[test]
fn csv_and_json_agree() {
    let args = ["simulate", "--model", "bst", "--n", "50", "--stat", "count", "--k", "1", "--reps", "300"];
    let v = json(&args);
    let mut a = args.to_vec();
    a.extend(["--format", "csv"]);
    let text = stdout(&fringe(&a));
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(rows) {
        assert_eq!(&rec[1], row["statistic"].as_str().unwrap());
        assert_eq!(&rec[6], row["estimate"].as_str().unwrap());
        assert_eq!(&rec[9], row["verdict"].as_str().unwrap());
        assert_eq!(&rec[10], v["config_hash"].as_str().unwrap());
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["simulate", "--model", "rrt", "--n", "200", "--stat", "count", "--k", "2", "--reps", "500", "--seed", "7"];
    let run = |t: &str| {
        let mut a = args.to_vec();
        a.extend(["--threads", t]);
        stdout(&fringe(&a))
    };
    assert_eq!(run("1"), run("2"));
}

#[test]
fn small_checks_pass() {
    assert_eq!(fringe(&["coupling-verify", "--model", "bst", "--n", "4"]).status.code(), Some(0));
    let lim = fringe(&["limit-fringe", "--model", "bst", "--stat", "protected(2)", "--draws", "20000"]);
    assert_eq!(lim.status.code(), Some(0));
    assert!(stdout(&lim).starts_with("PASS"));
    let ks = fringe(&[
        "ks", "--model", "bst", "--stat", "protected(2)", "--n", "500", "--reps", "500", "--center", "limit", "--tolerance", "0.1",
    ]);
    assert_eq!(ks.status.code(), Some(0));
}

#[test]
fn tv_reports_the_exact_distance() {
    let v = json(&["tv", "--model", "bst", "--stat", "count", "--k", "1", "--n", "8", "--reps", "200"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["statistic"].as_str().unwrap().starts_with("exact tv")));
}

#[test]
fn toll_catalog_lists_builtins() {
    let out = stdout(&fringe(&["tolls"]));
    for name in ["log-size", "protected-root", "leaf-protected-combo"] {
        assert!(out.contains(name));
    }
}

#[test]
fn protected_closed_moments_match_the_oracle() {
    let o = json(&["oracle", "--model", "bst", "--n", "9", "--stat", "protected(2)"]);
    let s = json(&["simulate", "--model", "bst", "--n", "9", "--stat", "protected(2)", "--reps", "100"]);
    let frac = |v: &Value| {
        let (a, b) = v.as_str().unwrap().split_once('/').unwrap();
        a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap()
    };
    for i in 0..2 {
        let target: f64 = s["rows"][i]["target"].as_str().unwrap().parse().unwrap();
        assert!((target - frac(&o["rows"][i]["estimate"])).abs() < 1e-9);
    }
}
