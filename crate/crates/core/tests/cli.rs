//! End-to-end tests of the `qrel` binary. Successful invocations are
//! compared byte for byte with `tests/golden/<name>.json`; run with
//! `QREL_BLESS=1` to rewrite those files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qrel::format::{self, Document};
use qrel::*;
use serde_json::Value;

fn dir(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join(sub)
}

fn fixture(name: &str) -> String {
    dir("fixtures").join(name).to_string_lossy().into_owned()
}

fn qrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrel"))
        .args(args)
        .env_remove("QREL_TOL")
        .output()
        .expect("binary runs")
}

/// Runs `args` with fixture names expanded to full paths.
fn run(args: &[&str]) -> Output {
    let expanded: Vec<String> = args
        .iter()
        .map(|a| {
            if a.ends_with(".json") {
                fixture(a)
            } else {
                a.to_string()
            }
        })
        .collect();
    let refs: Vec<&str> = expanded.iter().map(String::as_str).collect();
    qrel(&refs)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", stdout(o)))
}

fn ok(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["ok"], true);
    v
}

fn load(name: &str) -> Document {
    format::parse(&std::fs::read(fixture(name)).unwrap()).unwrap()
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn dim(result: &Value) -> usize {
    result["payload"]["basis"].as_array().unwrap().len()
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("props_v1", &["props", "--space", "v1.json"]),
    ("commutant_diag2", &["commutant", "--algebra", "diag2.json"]),
    ("diagonal_m2", &["diagonal", "--dim", "2"]),
    (
        "restrict_v1",
        &["restrict", "--space", "v1.json", "--proj", "e0.json"],
    ),
    (
        "independent_v1",
        &["independent", "--space", "v1.json", "--proj", "e0.json"],
    ),
    (
        "push_hadamard",
        &[
            "push",
            "--space",
            "v1.json",
            "--channel",
            "hadamard.json",
            "--check",
            "20",
            "--seed",
            "7",
        ],
    ),
    (
        "pull_hadamard",
        &[
            "pull",
            "--space",
            "v1.json",
            "--channel",
            "hadamard.json",
            "--check",
            "20",
            "--seed",
            "7",
        ],
    ),
    (
        "confusability_hadamard",
        &["confusability", "--channel", "hadamard.json"],
    ),
    (
        "confusability_bitflip3",
        &["confusability", "--channel", "bitflip3.json"],
    ),
    (
        "bipartite_bitflip3",
        &["bipartite", "--channel", "bitflip3.json"],
    ),
    (
        "kl_code",
        &[
            "kl-check",
            "--channel",
            "bitflip3.json",
            "--proj",
            "code.json",
        ],
    ),
    (
        "kl_badcode",
        &[
            "kl-check",
            "--channel",
            "bitflip3.json",
            "--proj",
            "badcode.json",
        ],
    ),
    (
        "morphism_hadamard",
        &[
            "morphism",
            "--channel",
            "hadamard.json",
            "--source",
            "v1.json",
            "--target",
            "full2.json",
        ],
    ),
    (
        "connects_v1",
        &[
            "connects", "--space", "v1.json", "--p", "e0.json", "--q", "e1.json",
        ],
    ),
    (
        "witness_v1",
        &["witness", "--space", "v1.json", "--matrix", "sigma_z.json"],
    ),
    ("recover_v1", &["recover", "--space", "v1.json"]),
    (
        "embed_chain3",
        &["classical-embed", "--relation", "chain3.json"],
    ),
    (
        "embed_stochastic",
        &["classical-embed", "--stochastic", "stochastic.json"],
    ),
    (
        "compose_hadamard",
        &[
            "compose",
            "--outer",
            "hadamard.json",
            "--inner",
            "hadamard.json",
        ],
    ),
];

#[test]
fn golden_outputs() {
    let bless = std::env::var_os("QREL_BLESS").is_some();
    let mut stale = Vec::new();
    for (name, args) in GOLDEN {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        let path = dir("golden").join(format!("{name}.json"));
        if bless {
            std::fs::create_dir_all(dir("golden")).unwrap();
            std::fs::write(&path, &o.stdout).unwrap();
            continue;
        }
        let want = std::fs::read(&path)
            .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if want != o.stdout {
            stale.push(*name);
        }
    }
    assert!(
        stale.is_empty(),
        "output differs from golden files: {stale:?}"
    );
}

#[test]
fn output_matches_in_process_results() {
    let phi = load("bitflip3.json").to_channel(tol()).unwrap();
    let conf = confusability(&phi, &StarAlgebra::full(8), tol()).unwrap();
    let v = ok(&["confusability", "--channel", "bitflip3.json"]);
    assert_eq!(v["result"], Document::space(conf.space()).to_value());

    let v1 = load("v1.json").to_space(tol()).unwrap();
    let rel = QuantumRelation::new(StarAlgebra::full(2), v1, tol()).unwrap();
    let recovered = recover_space(&rel, tol()).unwrap();
    let v = ok(&["recover", "--space", "v1.json"]);
    assert_eq!(v["result"], Document::space(&recovered).to_value());

    let outer = load("hadamard.json").to_channel(tol()).unwrap();
    let v = ok(&[
        "compose",
        "--outer",
        "hadamard.json",
        "--inner",
        "hadamard.json",
    ]);
    assert_eq!(
        v["result"],
        Document::channel(&compose(&outer, &outer).unwrap()).to_value()
    );
}

#[test]
fn unitary_channel_confuses_nothing() {
    let v = ok(&["confusability", "--channel", "hadamard.json"]);
    assert_eq!(v["result"]["kind"], "operator_space");
    assert_eq!(dim(&v["result"]), 1);
}

#[test]
fn bit_flip_code_is_correctable() {
    let v = ok(&[
        "kl-check",
        "--channel",
        "bitflip3.json",
        "--proj",
        "code.json",
    ]);
    assert_eq!(v["result"]["is_code"], true);
    assert_eq!(v["result"]["lambda"]["kind"], "matrix");
    let v = ok(&[
        "kl-check",
        "--channel",
        "bitflip3.json",
        "--proj",
        "badcode.json",
    ]);
    assert_eq!(v["result"]["is_code"], false);
}

#[test]
fn v1_flags() {
    let v = ok(&["props", "--space", "v1.json"]);
    assert_eq!(
        v["result"],
        serde_json::json!({"reflexive": true, "symmetric": true, "antisymmetric": false, "transitive": false})
    );
}

#[test]
fn witness_separates_sigma_z() {
    let v = ok(&["witness", "--space", "v1.json", "--matrix", "sigma_z.json"]);
    assert_eq!(v["result"]["k"], 2);
    assert_eq!(v["result"]["p"]["kind"], "projection");
}

#[test]
fn push_and_pull_checks_agree() {
    for cmd in ["push", "pull"] {
        let v = ok(&[
            cmd,
            "--space",
            "v1.json",
            "--channel",
            "hadamard.json",
            "--check",
            "30",
            "--seed",
            "3",
        ]);
        assert_eq!(v["check"]["samples"], 30);
        assert_eq!(v["check"]["disagreements"], 0);
    }
}

#[test]
fn classical_round_trip() {
    let v = ok(&["classical-embed", "--relation", "chain3.json"]);
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("space.json");
    std::fs::write(&path, format::emit_value(&v["result"])).unwrap();
    let back = qrel(&["classical-extract", "--space", path.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(json(&back)["result"], load("chain3.json").to_value());
}

#[test]
fn algebra_flag_changes_the_relation() {
    let full = ok(&["diagonal", "--dim", "2"]);
    let diag = ok(&["diagonal", "--algebra", "diag2.json"]);
    assert_eq!(dim(&full["result"]), 1);
    assert_eq!(dim(&diag["result"]), 2);
}

#[test]
fn runs_are_deterministic() {
    let args = [
        "push",
        "--space",
        "v1.json",
        "--channel",
        "bitflip3.json",
        "--check",
        "10",
        "--seed",
        "42",
    ];
    // v1 is over M_2 while bitflip3 acts on M_8: a validation error, deterministically
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "pull",
        "--space",
        "v1.json",
        "--channel",
        "hadamard.json",
        "--check",
        "25",
        "--seed",
        "42",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["props"],
        &["connects", "--space", "v1.json", "--level", "x"],
        &[],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let v = json(&o);
        assert_eq!(v["ok"], false);
        assert_eq!(v["result"], Value::Null);
        assert_eq!(v["error"]["kind"], "usage");
    }
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let o = run(&[flag]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn validation_errors_exit_two() {
    let o = run(&["confusability", "--channel", "not_tp.json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["kind"], "validation");
    assert!(v["error"]["path"]
        .as_str()
        .unwrap()
        .ends_with("payload.kraus"));

    let o = run(&["props", "--space", "hadamard.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(json(&o)["error"]["path"]
        .as_str()
        .unwrap()
        .ends_with("kind"));

    let o = run(&["props", "--space", "no_such_file.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"]["kind"], "io");

    let o = run(&["props", "--space", "v1.json", "--tol=-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_three() {
    let o = run(&[
        "witness",
        "--space",
        "v1.json",
        "--matrix",
        "identity2.json",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["ok"], false);
    assert_eq!(v["error"]["kind"], "precondition");
}

#[test]
fn tolerance_flag_beats_environment() {
    let base = Command::new(env!("CARGO_BIN_EXE_qrel"))
        .args(["props", "--space", &fixture("v1.json")])
        .env("QREL_TOL", "not a number")
        .output()
        .unwrap();
    assert_eq!(base.status.code(), Some(2));
    let flagged = Command::new(env!("CARGO_BIN_EXE_qrel"))
        .args(["props", "--space", &fixture("v1.json"), "--tol", "1e-9"])
        .env("QREL_TOL", "not a number")
        .output()
        .unwrap();
    assert_eq!(flagged.status.code(), Some(0));
}
