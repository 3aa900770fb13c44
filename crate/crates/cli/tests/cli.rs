use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_braidforge"));
    c.env_remove("BRAIDFORGE_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn relations_exit_codes() {
    assert_eq!(code(&run(&["relations", "--k", "3", "--rep", "qubit"])), 0);
    assert_eq!(code(&run(&["relations", "--k", "4"])), 0);
    let tl = run(&[
        "relations",
        "--k",
        "3",
        "--rep",
        "tl",
        "--Q",
        "2",
        "--format",
        "text",
    ]);
    assert_eq!(code(&tl), 0);
    assert!(text(&tl).contains("s_absorbs_ppair: violated as expected"));
    let bad = run(&["relations", "--k", "2", "--rep", "qubit"]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("k >= 3"));
}

#[test]
fn envelope_shape() {
    let v = json(&run(&["table", "t1"]));
    assert_eq!(v["tool"], "braidforge");
    assert_eq!(v["command"], "table");
    assert_eq!(v["seed"], 0xB41D);
    assert_eq!(v["pass"], true);
    assert_eq!(v["tolerances"]["gybe"], 1e-9);
    assert!(v["version"].is_string());
    assert!(v["anomalies"].as_array().unwrap().is_empty());
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn tables() {
    let t3 = json(&run(&["table", "t3"]));
    assert!(t3["result"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["slocc"] == "AC-B"));
    let t4 = json(&run(&["table", "t4"]));
    assert_eq!(t4["pass"], true);
    assert!(!t4["anomalies"].as_array().unwrap().is_empty());
    let tl = run(&["table", "tl_cases", "--Q", "2"]);
    assert_eq!(code(&tl), 0);
    assert_eq!(json(&tl)["result"]["cases"].as_array().unwrap().len(), 8);
    assert_eq!(code(&run(&["table", "t9"])), 2);
}

#[test]
fn solve_modes() {
    let o = run(&["solve", "--m", "3", "--l", "2", "--starts", "12"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let sols = v["result"]["solutions"].as_array().unwrap();
    assert!(!sols.is_empty());
    for s in sols {
        assert!(s["attempt"]["residual"].as_f64().unwrap() < 1e-10);
        assert!(s["max_closure_residual"].as_f64().unwrap() < 1e-6);
    }
    let flat = json(&run(&["solve", "--m", "2", "--l", "1", "--starts", "8"]));
    assert_eq!(flat["result"]["residual_everywhere_zero"], true);
    assert!(flat["result"]["finding"]
        .as_str()
        .unwrap()
        .contains("residual ≈ 0 everywhere"));
    let refused = run(&["solve", "--m", "5", "--l", "2"]);
    assert_eq!(code(&refused), 2);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("2l >= m"));
}

#[test]
fn reruns_are_identical() {
    let args = [
        "solve", "--m", "3", "--l", "2", "--starts", "8", "--seed", "17",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["compare-ghz", "--samples", "8"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn compare_ghz_obstructs_every_row() {
    let o = run(&["compare-ghz", "--samples", "8"]);
    assert_eq!(code(&o), 0);
    let rows = json(&o)["result"]["table_rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r["obstruction"]["verdict"] == "obstructed"));
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn classify_files() {
    let dir = tempfile::tempdir().unwrap();
    let swap = write(
        dir.path(),
        "swap.json",
        r#"{"dim":4,"d":2,"n":2,"entries":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#,
    );
    let v = json(&run(&["classify", &swap, "01"]));
    assert_eq!(v["result"]["label"], "Product");

    let f3p = dir.path().join("f3p.json");
    let f = f3p.to_str().unwrap();
    let built = run(&[
        "family",
        "F3P",
        "--param",
        "alpha1=-2",
        "--param",
        "alpha3=0",
        "--param",
        "beta1=0",
        "--param",
        "beta3=0",
        "--write-matrix",
        f,
    ]);
    assert_eq!(
        code(&built),
        0,
        "{}",
        String::from_utf8_lossy(&built.stderr)
    );
    let label = json(&run(&["classify", f, "000"]))["result"]["label"].clone();
    assert!(label.is_string());

    let f42 = dir.path().join("f42.json");
    let f = f42.to_str().unwrap();
    let params = [
        "alpha1=-2",
        "alpha3=0",
        "beta1=0",
        "beta2=0",
        "beta3=2",
        "gamma2=0",
    ];
    let mut args = vec!["family", "F42", "--write-matrix", f];
    for p in &params {
        args.extend(["--param", p]);
    }
    assert_eq!(code(&run(&args)), 0);
    let v = json(&run(&["classify", f, "0000"]));
    assert_eq!(
        v["result"]["witness"]["factors"],
        serde_json::json!([[1, 3, 4], [2]])
    );

    let state = write(
        dir.path(),
        "state.json",
        r#"{"n":2,"amplitudes":[[1,0],[0,0],[0,0],[0,0]]}"#,
    );
    assert_eq!(code(&run(&["classify", &swap, &state])), 0);
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(code(&run(&["classify", &bad, "00"])), 2);
    assert_eq!(code(&run(&["classify", &swap, "000"])), 2);
    assert_eq!(code(&run(&["classify", "/nonexistent/m.json", "00"])), 2);
}

#[test]
fn tolerance_from_environment_and_failing_exit() {
    let o = bin()
        .args([
            "family", "F2P", "--param", "alpha=1", "--param", "beta=1", "--param", "gamma=1",
        ])
        .env("BRAIDFORGE_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(json(&o)["tolerances"]["gybe"], 1e-7);
    let angles = [
        "family",
        "F3P",
        "--angles",
        "3.14159265358979,0,3.14159265358979,0",
    ];
    let v = json(&run(&angles));
    let resid = v["result"]["gybe"]["abs_residual"].as_f64().unwrap();
    assert!(resid > 0.0 && resid < 1e-20);
    let strict = [&angles[..], &["--tol", "1e-300"]].concat();
    assert_eq!(code(&run(&strict)), 1);
    assert_eq!(code(&run(&["family", "F2P", "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["family", "F3P", "--param", "alpha1"])), 2);
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t2.csv");
    let o = run(&[
        "table",
        "t2",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let mut lines = body.lines();
    assert!(lines.next().unwrap().starts_with("row,matrix_residual"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn family_listing_and_real_points() {
    let v = json(&run(&["family"]));
    assert_eq!(v["result"].as_array().unwrap().len(), 7);
    let v = json(&run(&["family", "F2Pair", "--real-unitary"]));
    assert_eq!(v["result"]["count"], 2);
    assert_eq!(v["pass"], true);
    let v = json(&run(&["family", "ftl4", "--real-unitary", "--Q", "0.5"]));
    assert_eq!(v["result"]["count"], 8);
}
