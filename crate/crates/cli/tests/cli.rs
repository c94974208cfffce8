use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divrel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path: PathBuf = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn sample_size_reference() {
    let v = json(&[
        "sample-size", "--mq", "40", "--varq", "20", "--mean-box", "43", "47", "--var-box", "18", "22",
        "--alphabet", "2", "--epsilon", "1e-10",
    ]);
    assert!((f(&v["results"]["d_star"]["value"]) - 0.203).abs() < 1e-3);
    assert_eq!(v["results"]["n_star"], 138);
    assert_eq!(v["inputs"]["mean_box"][1], 47.0);
    let v = json(&[
        "sample-size", "--mq", "40", "--varq", "20", "--mean-box", "43", "47", "--var-box", "18", "22",
        "--alphabet", "100", "--epsilon", "1e-10",
    ]);
    assert_eq!(v["results"]["n_star"], 4170);
}

#[test]
fn redundancy_reference() {
    let v = json(&["redundancy", "--lambdas", "16", "20", "24", "28", "32", "--weights", "uniform"]);
    let r = &v["results"];
    assert!((f(&r["sum_kl_upper_bits"]) - 1.46).abs() < 0.01);
    assert!((f(&r["convexity_upper_bits"]) - 1.99).abs() < 0.01);
    assert!((f(&r["nu_improved"]["upper"]) - 0.570).abs() < 0.005);
    assert!((f(&r["nu_convexity"]["upper"]) - 0.693).abs() < 0.005);
    let explicit = json(&["redundancy", "--lambdas", "16", "20", "--weights", "0.25", "0.75"]);
    assert_eq!(explicit["inputs"]["weights"][1], 0.75);
}

#[test]
fn divergence_of_identical_files_is_zero() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", r#"{"support": [0, 1, 2], "mass": [0.2, 0.3, 0.5]}"#);
    let v = json(&["divergence", "--spec", "kl", &p, &p]);
    assert_eq!(f(&v["results"]["value"]), 0.0);
    let q = write(&dir, "q.json", "[0.5, 0.5]");
    let v = json(&["divergence", "--spec", "chi2", &q, &p]);
    assert!(f(&v["results"]["value"]) > 0.0);
    let point = write(&dir, "r.json", "[1.0, 0.0, 0.0]");
    let v = json(&["divergence", "--spec", "kl", &p, &point]);
    assert_eq!(v["results"]["value"], "inf");
}

#[test]
fn validation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "[0.7, 0.7]");
    let out = run(&["divergence", "--spec", "kl", &bad, &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(&["divergence", "--spec", "renyi", &bad, &bad]).status.code(), Some(1));
    assert_eq!(run(&["moment-bound", "--mp", "1", "--varp", "-1", "--mq", "0", "--varq", "1"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn moment_bound_with_attaining_pair() {
    let v = json(&["moment-bound", "--mp", "45", "--varp", "20", "--mq", "40", "--varq", "20", "--attain"]);
    let bound = f(&v["results"]["bound_nats"]);
    assert!((bound - 0.521).abs() < 1e-3);
    assert!((f(&v["results"]["attaining_pair"]["kl_nats"]) - bound).abs() < 1e-12);
    assert_eq!(v["results"]["attaining_pair"]["p"]["mass"].as_array().unwrap().len(), 2);
}

#[test]
fn contraction_on_bsc() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", r#"{"rows": [[0.9, 0.1], [0.1, 0.9]]}"#);
    let q = write(&dir, "q.json", "[0.5, 0.5]");
    let v = json(&["contraction", "--channel", &w, "--input", &q, "--alpha", "0.5", "--family", "S", "--brute-budget", "500"]);
    let r = &v["results"];
    assert!((f(&r["chi2_contraction"]) - 0.64).abs() < 1e-12);
    let est = f(&r["search"]["point_estimate"]);
    assert!(est <= 0.64 && est >= 0.64 - 1e-4, "{est}");
    assert_eq!(r["search"]["upper"], "inf");
    assert_eq!(r["search_within_sandwich"], true);
}

#[test]
fn mixing_and_set_divergence() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w.json", "[[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]]");
    let p0 = write(&dir, "p0.json", "[1.0, 0.0, 0.0]");
    let v = json(&["mixing", "--chain", &w, "--p0", &p0, "--n-max", "10"]);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 10);
    assert!(v["results"]["rows"].as_array().unwrap().iter().all(|r| r["within_envelope"] == true));
    let nonrev = write(&dir, "n.json", "[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]");
    assert_eq!(run(&["mixing", "--chain", &nonrev, "--p0", &p0]).status.code(), Some(1));

    let mu = write(&dir, "mu.json", "[0.1, 0.2, 0.3, 0.4]");
    let v = json(&["set-divergence", "--mu", &mu, "--set", "1", "3", "--spec", "renyi:2"]);
    let expected = -(0.6f64).ln();
    assert!((f(&v["results"]["direct"]) - expected).abs() < 1e-12);
    assert!((f(&v["results"]["closed_form"]) - expected).abs() < 1e-12);
}

#[test]
fn identity_check_and_sweep() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", "[0.1, 0.2, 0.7]");
    let q = write(&dir, "q.json", "[0.5, 0.3, 0.2]");
    for which in ["kl-chi2", "gv", "chi2-half", "substitution", "recursive"] {
        let v = json(&["identity-check", "--which", which, "--lambda", "0.6", &p, &q]);
        assert_eq!(v["results"]["passed"], true, "{which}");
    }
    let v = json(&["inequalities", "--seed", "3", "--trials", "20"]);
    assert_eq!(v["results"]["total_violations"], 0);
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let args = ["inequalities", "--seed", "5", "--trials", "10", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let summary: divrel::inequalities::SweepSummary =
        serde_json::from_value(v["results"]["summary"].clone()).expect("report re-validates");
    assert_eq!(summary.trials, 10);

    let v = json(&["redundancy", "--lambdas", "3", "5"]);
    let rep: divrel::applications::RedundancyReport = serde_json::from_value(v["results"].clone()).unwrap();
    assert_eq!(rep.sources.len(), 2);
}

#[test]
fn csv_and_table_formats() {
    let out = run(&["moment-bound", "--mp", "1", "--varp", "1", "--mq", "0", "--varq", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("section,field,value\n"));
    assert!(text.contains("\nresults,bound_nats,"));
    assert!(text.contains("\ninputs,mp,1.0\n"));
    let out = run(&["moment-bound", "--mp", "1", "--varp", "1", "--mq", "0", "--varq", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[results]") && text.contains("bound_nats"));
}
