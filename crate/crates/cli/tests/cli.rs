use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use ambitab::fixtures;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambitab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

#[test]
fn shared_consequent_is_proved() {
    let o = run(&["prove", "--calculus", "tcup", &format!("({} & p) -> p", fixtures::EVERY_MAN)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "tcup: proved\n");
}

#[test]
fn disambiguate_prints_both_readings() {
    let o = run(&["disambiguate", fixtures::EVERY_MAN]);
    assert_eq!(o.status.code(), Some(0));
    let want = format!("{}\n{}\n", fixtures::STRONG_READING, fixtures::WEAK_READING);
    assert_eq!(stdout(&o), want);
}

#[test]
fn classical_calculus_rejects_urs() {
    let o = run(&["prove", "--calculus", "tc", fixtures::EVERY_MAN]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("URs require tcu/tcup"));
}

#[test]
fn parse_errors_carry_locations() {
    let o = run(&["prove", "p &\n  (q |"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2:7"), "{}", stderr(&o));
}

#[test]
fn limits_must_be_positive() {
    assert_eq!(run(&["prove", "p -> p", "--gamma", "0"]).status.code(), Some(2));
    assert_eq!(run(&["check", "p -> p", "--max-domain", "0"]).status.code(), Some(2));
}

#[test]
fn unproved_is_status_one() {
    let o = run(&["prove", "--calculus", "tc", "p -> q"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "tc: not proved\n");
}

#[test]
fn check_finds_the_reflexivity_countermodel() {
    let em = fixtures::EVERY_MAN;
    let o = run(&["check", &format!("{em} |- {em}"), "--max-domain", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("counterexample: model {"));
    let o = run(&["check", &format!("{} |- {em}", fixtures::STRONG_READING)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid on all models up to size 3\n");
}

#[test]
fn check_in_a_given_model() {
    let model = scratch("mixed.model", "model { domain = {m1, m2, w1, w2}; man = {m1, m2}; woman = {w1, w2}; love = {(m1,w1), (m2,w2)} }");
    let m = model.to_str().unwrap();
    let o = run(&["check", &format!("|- {}", fixtures::EVERY_MAN), "--model", m]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = run(&["check", &format!("|- {}", fixtures::WEAK_READING), "--model", m]);
    assert_eq!(o.status.code(), Some(0));
    let bad = scratch("bad.model", "model { domain = {a}; man = {b} }");
    let o = run(&["check", "p", "--model", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:30"), "{}", stderr(&o));
}

#[test]
fn documents_with_definitions() {
    let doc = format!("let A = {} ;\n@A & q |- q", fixtures::BOY_MOVIE);
    let f = scratch("boy.amb", &doc);
    let o = run(&["prove", "--file", f.to_str().unwrap(), "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let record: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(record["result"], "proved");
    assert_eq!(record["total_disambiguations"], 0);
}

#[test]
fn structured_tree_records() {
    let o = run(&["prove", "--tree", "--format", "structured", fixtures::BOY_MOVIE]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines[0]["result"].as_str().unwrap().starts_with("not proved"));
    let first = &lines[1];
    for k in ["id", "parent", "sign", "formula", "rule", "premise", "disambiguation", "ur_state"] {
        assert!(first.get(k).is_some(), "missing {k}");
    }
    assert_eq!(lines[2]["rule"], "F:UR");
}

#[test]
fn dot_output() {
    let o = run(&["prove", "--format", "dot", "p & q -> p"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("digraph"));
    assert!(s.trim_end().ends_with('}'));
}

#[test]
fn output_is_deterministic() {
    let phi = format!("{} -> {}", fixtures::BOY_MOVIE, fixtures::BOY_MOVIE);
    let args = ["prove", "--tree", "--format", "structured", "--gamma", "2", phi.as_str()];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn oracle_on_one_formula() {
    let o = run(&["oracle", &format!("{} -> {}", fixtures::EVERY_MAN, fixtures::WEAK_READING)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let reports: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["agreement"] == true));
    let o = run(&["oracle", &format!("{} ; p", fixtures::EVERY_MAN)]);
    assert_eq!(o.status.code(), Some(2));
}
