use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems").join(name)
}

fn mcalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcalg")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn normal_form_log_replays_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("nf.json");
    let input = problem("q2_noise.prob");
    let out = mcalg(&["normal-form", path(&input), "-o", saved.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let nf: Value = serde_json::from_slice(&std::fs::read(&saved).unwrap()).unwrap();
    assert_eq!(nf["residual"], "0");
    assert_eq!(nf["lambda"], "2");
    assert_eq!(nf["mu"], serde_json::json!(["1", "1", "3"]));
    assert!(!nf["gauge_log"].as_array().unwrap().is_empty());

    let out = mcalg(&["normal-form", path(&input), "--replay", saved.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep["mode"], "replay");
    assert_eq!(rep["output"], nf["output"]);
    assert_eq!(rep["residual"], "0");
}

#[test]
fn moduli_eigenvalue_table() {
    let out = mcalg(&["qh-split", "--builtin", "qh_moduli_sigma2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["eigenvalues"], serde_json::json!({ "4": 1, "0": 6, "-4": 1 }));
    assert_eq!(r["idempotent_laws"], true);
    let from_file = report(&mcalg(&["qh-split", path(&problem("moduli_sigma2.prob"))]));
    assert_eq!(from_file["eigenvalues"], r["eigenvalues"]);
    assert_eq!(from_file["blocks"], r["blocks"]);
}

#[test]
fn failing_pair_names_the_bracket() {
    let out = mcalg(&["hh", path(&problem("bad_pair.prob"))]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["failing_bracket"], "[eta,eta]");
    assert_eq!(r["status"], "failed");
}

#[test]
fn reports_are_byte_identical() {
    let q2 = problem("q2.prob");
    let args = ["invariant-hh", path(&q2)];
    let a = mcalg(&args);
    let b = mcalg(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!((r["even"].as_u64(), r["odd"].as_u64()), (Some(2), Some(0)));
    assert_eq!(r["even_basis"], serde_json::json!(["(1)", "(v1*v2*v3)"]));
}

#[test]
fn ranks_and_totals() {
    let r = report(&mcalg(&["twisted-hh", path(&problem("q3.prob"))]));
    assert_eq!((r["even"].as_u64(), r["odd"].as_u64()), (Some(2), Some(6)));
    let r = report(&mcalg(&["jacobian", path(&problem("q2.prob"))]));
    assert_eq!(r["total"], 14);
    assert_eq!(r["orders_agree"], true);
    let r = report(&mcalg(&["hh", path(&problem("x5.prob")), "--trunc", "12", "--window", "5"]));
    assert_eq!((r["even"].as_u64(), r["trunc"].as_u64(), r["window"].as_u64()), (Some(4), Some(12), Some(5)));
    let r = report(&mcalg(&["semidirect-check", path(&problem("q2.prob"))]));
    assert_eq!(r["dim"], 40);
    let r = report(&mcalg(&["classify-cubic", path(&problem("typeb.prob"))]));
    assert_eq!(r["class"], "TypeB");
}

#[test]
fn non_isolated_singularity_exits_one_with_witness() {
    let out = mcalg(&["exactness", path(&problem("common_factor.prob"))]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["witness"]["class"], "(v1)*e{1,3} + (-v2)*e{2,3}");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let no_trunc = write("a.prob", "vars v1\nW = v1^3\n");
    let bad_weights = write("b.prob", "vars v1 v2\ntrunc 6\ngroup cyclic 3 weights 1\nW = v1^3\n");
    let q2 = problem("q2.prob");
    let cases: Vec<Vec<&str>> = vec![
        vec!["hh", path(&no_trunc)],
        vec!["hh", path(&bad_weights)],
        vec!["hh", path(&q2), "--window", "12"],
        vec!["hh", path(&q2), "--genus", "2"],
        vec!["qh-split", "--builtin", "nonsense"],
        vec!["frobnicate", path(&q2)],
        vec!["hh"],
    ];
    for args in cases {
        let out = mcalg(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = mcalg(&["hh", path(&no_trunc)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("trunc"));
}
