use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetanull")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

/// Runs a command expected to succeed and returns its `result`.
fn result(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["config"].is_object());
    v["result"].clone()
}

#[test]
fn enumerate_counts() {
    for (g, even, odd) in [(1, 3, 1), (3, 36, 28), (6, 2080, 2016)] {
        let r = result(&["enumerate", "--genus", &g.to_string()]);
        assert_eq!(r["even"], even);
        assert_eq!(r["odd"], odd);
    }
    assert_eq!(result(&["enumerate", "--genus", "6"])["vanishing"], 364);
    assert_eq!(result(&["enumerate", "--genus", "3"])["vanishing"], 1);
    assert_eq!(code(&["enumerate", "--genus", "9"]), 3);
    assert_eq!(code(&["enumerate", "--genus", "0"]), 3);
}

#[test]
fn classify_fixtures() {
    let classify = |file: &str| run(&["classify", "--genus", "6", "--input", &data(file)]);
    let a2: Value = serde_json::from_slice(&classify("quad_a2.json").stdout).unwrap();
    assert_eq!(a2["result"]["class"], "A2");
    let a3: Value = serde_json::from_slice(&classify("quad_a3.json").stdout).unwrap();
    assert_eq!(a3["result"]["class"], "A3");
    assert_eq!(classify("quad_duplicate.json").status.code(), Some(2));
    assert_eq!(classify("quad_odd.json").status.code(), Some(3));
    assert_eq!(classify("quad_malformed.json").status.code(), Some(2));
    assert_eq!(code(&["classify", "--genus", "6", "--input", "/nonexistent.json"]), 2);
    assert_eq!(code(&["classify", "--genus", "3", "--input", &data("quad_a2.json")]), 2);
}

#[test]
fn orbit_census_in_genus_two() {
    let r = result(&["orbit-census", "--genus", "2"]);
    assert_eq!(r["total"], 210);
    assert_eq!(r["counts"], r["orbit_sizes"]);
}

#[test]
fn theta_commands() {
    let eval = result(&["theta", "eval", "--input", &data("theta_eval.json")]);
    let v = &eval["values"][0]["value"];
    assert!(v["bound"].as_f64().unwrap() <= 1e-12);
    assert_eq!(eval["values"][0]["parity"], "even");

    let all = result(&["theta", "eval", "--input", &data("theta_eval_all.json")]);
    let values = all["values"].as_array().unwrap();
    assert_eq!(values.len(), 16);
    for row in values.iter().filter(|r| r["parity"] == "odd") {
        assert!(row["value"]["re"].as_f64().unwrap().abs() <= 1e-12);
        assert!(row["value"]["im"].as_f64().unwrap().abs() <= 1e-12);
    }

    let t = result(&["theta", "transform", "--input", &data("theta_transform.json")]);
    assert_eq!(t["acted_characteristic"], serde_json::json!([0, 1]));
    assert!(t["diff"].as_f64().unwrap() <= t["tol"].as_f64().unwrap());

    let s = result(&["theta", "split", "--input", &data("theta_split.json")]);
    assert!(s["diff"].as_f64().unwrap() <= s["tol"].as_f64().unwrap());

    assert_eq!(code(&["theta", "eval", "--input", &data("theta_bad_siegel.json")]), 3);
    assert_eq!(code(&["theta", "eval", "--input", &data("theta_eval.json"), "--eps", "0"]), 2);
    assert_eq!(code(&["theta", "eval", "--input", &data("quad_malformed.json")]), 2);
}

#[test]
fn hyperelliptic_commands() {
    let c = result(&["hyperelliptic", "counts", "--genus", "6"]);
    assert_eq!((c["even"].clone(), c["odd"].clone(), c["vanishing"].clone()), (2080.into(), 2016.into(), 364.into()));
    let v = result(&["hyperelliptic", "vanishing", "--genus", "3"]);
    assert_eq!(v["characteristics"].as_array().unwrap().len(), 1);
    let cut = result(&["hyperelliptic", "cut", "--genus", "6", "--points", "1,2,3,4"]);
    assert!(!cut["characteristics"].as_array().unwrap().is_empty());
    assert_eq!(code(&["hyperelliptic", "counts", "--genus", "40"]), 3);
}

#[test]
fn bielliptic_and_transversal() {
    let b = result(&["bielliptic", "verify"]);
    assert!(b.as_array().unwrap().iter().all(|w| w["class"] == w["expected"]));
    let t = result(&["transversal", "--genus", "6", "--nodes", &data("nodes_g6.json")]);
    assert_eq!(t["report"]["rank"], 4);
    assert_eq!(t["report"]["expected_rank"], 4);
    assert_eq!(result(&["transversal", "--genus", "5"])["report"]["pass"], true);
    assert_eq!(code(&["transversal", "--genus", "7", "--nodes", &data("nodes_g6.json")]), 2);
}

#[test]
fn output_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("thetanull-cli-{}.json", std::process::id()));
    let out = run(&["--output", path.to_str().unwrap(), "enumerate", "--genus", "2"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["even"], 10);
    assert_eq!(v["config"]["output"], path.to_str().unwrap());
    std::fs::remove_file(path).unwrap();
}
