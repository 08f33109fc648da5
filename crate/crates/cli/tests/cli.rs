//! End-to-end runs of the `isect` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use isect::syntax::{parse_annotated, parse_untyped};
use isect::typing::{erase_derivation, minimal_context};
use serde_json::Value;
use tempfile::NamedTempFile;

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn isect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isect")).args(args).output().unwrap()
}

fn run_on(cmd: &str, contents: &str, extra: &[&str]) -> Output {
    let f = file(contents);
    let mut args = vec![cmd, f.path().to_str().unwrap()];
    args.extend_from_slice(extra);
    isect(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

const EXAMPLE: &str = r"(\x:{a}.y^b){(\x:{b}.z^a) w^b}";

#[test]
fn measure_of_identity_redex() {
    let v = json(&run_on("measure", r"(\x:{a}.x^a){y^a}", &[]));
    assert_eq!(v["W"], 1);
    assert_eq!(v["formatVersion"], 1);
    assert_eq!(v["normalForm"], "y^a [y^a]");
}

#[test]
fn normalize_memorizes_erased_arguments() {
    let o = run_on("normalize", EXAMPLE, &["--calculus=im"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), "y^b [z^a [w^b]]");
    let v = json(&run_on("normalize", EXAMPLE, &["--calculus=i", "--json"]));
    assert_eq!(v["normalForm"], "y^b");
    assert_eq!(v["steps"], 2);
}

#[test]
fn omega_is_not_typed() {
    let o = run_on("infer-sn", r"(\x.x x)(\x.x x)", &["--fuel=10000"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn infer_sn_output_checks_and_erases_back() {
    let src = r"(\x.x x)(\x.x)";
    let v = json(&run_on("infer-sn", src, &["--json"]));
    let term = v["term"].as_str().unwrap();
    let t = parse_annotated(term).unwrap();
    assert_eq!(json(&run_on("check", term, &["--json"]))["type"], v["type"]);
    assert_eq!(stdout(&run_on("erase", term, &[])).trim(), parse_untyped(src).unwrap().to_string());
    assert_eq!(t.to_string(), term);
}

#[test]
fn exit_codes() {
    assert_eq!(run_on("check", r"(\x:{a}.x^a", &[]).status.code(), Some(1));
    assert_eq!(run_on("check", "x^a {y^b}", &[]).status.code(), Some(2));
    assert_eq!(run_on("erase", "y^a [z^b]", &[]).status.code(), Some(3));
    assert_eq!(run_on("measure", "y^a [z^b]", &[]).status.code(), Some(3));
    assert_eq!(run_on("normalize", EXAMPLE, &["--fuel=0"]).status.code(), Some(4));
    assert_eq!(run_on("simulate", EXAMPLE, &["missing.lam", "--pos=root"]).status.code(), Some(1));
    assert_eq!(isect(&["bogus"]).status.code(), Some(1));
    assert_eq!(isect(&["check", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(isect(&["--help"]).status.code(), Some(0));
}

#[test]
fn reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_isect"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br"\x:{a}.x^a").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("type: a -> a"));
}

#[test]
fn reduce_traces_are_deterministic_and_reparse() {
    let term = r"(\x:{a, a -> a}. x^(a -> a) x^a) {\y:{a}. y^a, z^a}";
    for strategy in ["leftmost", "random"] {
        let args = ["--calculus=im", "--strategy", strategy, "--seed=7"];
        let a = run_on("reduce", term, &args);
        let b = run_on("reduce", term, &args);
        assert_eq!(a.stdout, b.stdout);
        let v = json(&a);
        assert_eq!(v["normal"], true);
        let steps = v["steps"].as_array().unwrap();
        assert!(!steps.is_empty());
        for s in steps {
            assert_eq!(s["kind"], "im");
            let r = s["result"].as_str().unwrap();
            assert_eq!(parse_annotated(r).unwrap().to_string(), r);
        }
    }
    let v = json(&run_on("reduce", term, &["--steps=0"]));
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
    assert_eq!(v["normal"], false);
}

#[test]
fn chains_report_the_bound() {
    let v = json(&run_on("chains", EXAMPLE, &["--json"]));
    assert_eq!(v["verdict"], "chain ≤ W");
    assert!(v["longestChain"].as_u64().unwrap() <= v["W"].as_u64().unwrap());
}

#[test]
fn simulate_contracts_every_copy() {
    let t = file(r"(\x:{a}.z^(a->a->b) x^a x^a) y^a");
    let m = file(r"(\x.z x x) y");
    let v = json(&isect(&[
        "simulate",
        t.path().to_str().unwrap(),
        m.path().to_str().unwrap(),
        "--pos=root",
    ]));
    assert_eq!(v["contractum"], "z y y");
    assert_eq!(v["result"], "z^(a -> a -> b) y^a y^a");
}

#[test]
fn decorate_inverts_erasure_of_derivations() {
    let src = r"(\x:{b -> b, (b -> b) -> b -> b}. x^((b -> b) -> b -> b) x^(b -> b)) {\y:{b}. y^b, \y:{b -> b}. y^(b -> b)}";
    let t = parse_annotated(src).unwrap();
    let d = erase_derivation(&minimal_context(&t).unwrap(), &t).unwrap();
    let o = run_on("decorate", &d.to_json().to_string(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(parse_annotated(stdout(&o).trim()).unwrap(), t);
    assert_eq!(run_on("decorate", "{not json", &[]).status.code(), Some(1));
}

#[test]
fn graphs_in_both_formats() {
    let dot = run_on("graph", EXAMPLE, &["--calculus=im", "--format=dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
    let v = json(&run_on("graph", EXAMPLE, &["--calculus=i", "--format=json"]));
    assert!(v["nodes"].as_array().unwrap().len() >= 2);
    let beta = json(&run_on("graph", r"(\x.x x)(\x.x)", &["--calculus=beta", "--format=json"]));
    assert!(!beta["edges"].as_array().unwrap().is_empty());
    assert_eq!(run_on("graph", "y^a [z^b]", &["--calculus=i"]).status.code(), Some(3));
}
