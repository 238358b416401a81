use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qobdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qobdd")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn build_is_reproducible_and_eval_accepts_equal_strings() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = qobdd(&["build", "--function", "eq", "--n", "3", "--epsilon", "0.25", "--seed", "7", "--out", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let program = a.to_str().unwrap();
    let yes = json(&qobdd(&["eval", "--program", program, "--input", "101101"]));
    assert!((yes["accept_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let no = json(&qobdd(&["eval", "--program", program, "--input", "101100"]));
    let p = no["accept_probability"].as_f64().unwrap();
    assert!(p < 0.25);
    assert!((p - no["closed_form"].as_f64().unwrap()).abs() < 1e-6);

    assert_eq!(qobdd(&["eval", "--program", program, "--input", "10110"]).status.code(), Some(2));
    assert_eq!(qobdd(&["eval", "--program", program, "--input", "10x101"]).status.code(), Some(2));
}

#[test]
fn verify_and_goodset_report_success() {
    let out = qobdd(&["verify", "--function", "mod", "--m", "3", "--n", "8", "--epsilon", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], Value::Bool(true));

    let out = qobdd(&["goodset", "--epsilon", "0.5", "--modulus", "1024", "--seed", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["t"], 32);
    assert_eq!(v["params"].as_array().unwrap().len(), 32);

    let out = qobdd(&["goodset", "--epsilon", "0.5", "--modulus", "340282366920938463463374607431768211456"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["verified"], "skipped");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(qobdd(&["build", "--function", "mod", "--epsilon", "0.2", "--out", "/dev/null"]).status.code(), Some(2));
    assert_eq!(qobdd(&["goodset", "--epsilon", "1.5", "--modulus", "64"]).status.code(), Some(2));
    assert_eq!(qobdd(&["hsf", "--cyclic", "6", "--subgroup-generator", "9", "--epsilon", "0.25"]).status.code(), Some(2));
}

#[test]
fn sop_file_and_group_table_inputs() {
    let dir = tempfile::tempdir().unwrap();
    // negation of x1 AND x2 is the SOP ¬x1 + ¬x2
    let sop = dir.path().join("sop.json");
    fs::write(&sop, r#"{"n": 2, "products": [[-1], [-2]]}"#).unwrap();
    let out = qobdd(&["verify", "--function", "sop-file", "--file", sop.to_str().unwrap(), "--epsilon", "0.25"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let table = dir.path().join("z4.json");
    fs::write(&table, r#"{"order": 4, "table": [[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]], "subgroup": [0, 2]}"#).unwrap();
    let out = qobdd(&["hsf", "--table", table.to_str().unwrap(), "--epsilon", "0.25", "--sweep"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn report_lists_shipped_functions() {
    let out = qobdd(&["report", "--text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["MOD_64", "EQ_4", "Palindrome_11", "PERM_3"] {
        assert!(text.contains(name), "{text}");
    }
}
