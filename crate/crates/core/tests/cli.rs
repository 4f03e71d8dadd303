use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmmsnp")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classify_reports_verdicts_and_exit_codes() {
    let out = run(&["classify", "2", "2", "3", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "TractableAIP");

    let out = run(&["classify", "3", "6", "2", "2"]);
    assert_eq!(stdout_json(&out)["verdict"], "HardUnderRich2to1");

    let out = run(&["classify", "3", "2", "2", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["verdict"], "NoContainment");

    assert_eq!(run(&["classify", "0", "1", "1", "1"]).status.code(), Some(64));
    assert_eq!(run(&["classify", "x"]).status.code(), Some(64));
}

#[test]
fn solve_colours_or_flags_a_broken_promise() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", r#"{"variables":4,"arity":4,"edges":[[0,1,2,3],[3,2,1,0]]}"#);
    let out = run(&["solve", "--c", "2", "--d", "2", "--k", "3", "--l", "4", &good]);
    assert_eq!(out.status.code(), Some(0));
    let col: Vec<u64> = serde_json::from_value(stdout_json(&out)["colouring"].clone()).unwrap();
    assert_eq!(col.len(), 4);
    assert!(col.iter().any(|&x| x != col[0]));

    let bad = write(dir.path(), "bad.json", r#"{"variables":2,"arity":4,"edges":[[0,0,0,0]]}"#);
    let out = run(&["solve", "--c", "2", "--d", "2", "--k", "3", "--l", "4", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["result"], "PROMISE_VIOLATION");

    let out = run(&["solve", "--c", "3", "--d", "6", "--k", "2", "--l", "2", &good]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn girth_and_reductions() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "tri.json", r#"{"domain":3,"relations":{"E":{"arity":2,"tuples":[[0,1],[1,2],[2,0]]}}}"#);
    let out = run(&["girth", "--bound", "3", &tri]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["verdict"], false);
    assert_eq!(report["witness"].as_array().unwrap().len(), 3);
    assert_eq!(stdout_json(&run(&["girth", "--bound", "2", &tri]))["verdict"], true);

    let k4 = write(
        dir.path(),
        "k4.json",
        r#"{"domain":4,"relations":{"E":{"arity":2,"tuples":[[0,1],[0,2],[0,3],[1,0],[1,2],[1,3],[2,0],[2,1],[2,3],[3,0],[3,1],[3,2]]}}}"#,
    );
    let out = run(&["reduce", "sigma", "--cliques", "2:3:2:4", &k4]);
    assert_eq!(out.status.code(), Some(0));
    let sigma = stdout_json(&out);
    let rels = sigma["relations"].as_object().unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels.values().next().unwrap()["tuples"].as_array().unwrap().len(), 24);

    let one = write(dir.path(), "one.json", r#"{"domain":4,"relations":{"R_0_0":{"arity":4,"tuples":[[0,1,2,3]]}}}"#);
    let out = run(&["reduce", "tau", "--cliques", "2:3:2:4", "--girth", "5", &one]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["relations"]["E"]["tuples"].as_array().unwrap().len(), 12);
}

#[test]
fn oracle_and_recolour() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(
        dir.path(),
        "k4.json",
        r#"{"domain":4,"relations":{"E":{"arity":2,"tuples":[[0,1],[0,2],[0,3],[1,0],[1,2],[1,3],[2,0],[2,1],[2,3],[3,0],[3,1],[3,2]]}}}"#,
    );
    let out = run(&["oracle", "pmmsnp", "--cliques", "2:3:2:4", &k4]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "YesMapsToPromise");
    assert_eq!(run(&["recolour", "--cliques", "3:2:2:2"]).status.code(), Some(2));
    assert_eq!(run(&["recolour", "--cliques", "2:3:2:4"]).status.code(), Some(0));
}

#[test]
fn connectivity_dot_output() {
    let out = run(&["connectivity", "reconf", "--rel", "lo:3:3", "--dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 21);
    assert_eq!(run(&["connectivity", "reconf", "--rel", "bogus:1"]).status.code(), Some(64));
}

#[test]
fn gadget_writes_hypergraph_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("g.json");
    let out = run(&["gadget", "--n", "2", "--m", "2", "--rel", "nae:2:2", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["audit"], true);
    assert_eq!(summary["completeness"], true);
    let h: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(h["arity"], 2);
    let prov = dir.path().join("g.json.provenance.json");
    let p: Value = serde_json::from_str(&std::fs::read_to_string(prov).unwrap()).unwrap();
    assert_eq!(p["n"], 2);
}
