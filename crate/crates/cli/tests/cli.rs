use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uqrs"))
        .args(args)
        .env("UQRS_CACHE", std::env::temp_dir().join("uqrs-cli-tests"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json");
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&value).unwrap()
}

fn json_of(args: &[&str]) -> serde_json::Value {
    let o = run(args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("schema violations for {args:?}: {msgs:?}");
    }
    v
}

#[test]
fn classify_type_a_order_4() {
    let o = run(&["classify", "--family", "A", "--ell", "4", "--format", "markdown"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| #")).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].contains("(1,3) (3,1)") && rows[3].ends_with("yes |"));
}

#[test]
fn classify_g2_order_8_has_16_rows() {
    let v = json_of(&["classify", "--family", "G2", "--ell", "8", "--format", "json"]);
    assert_eq!(v["classes"].as_array().unwrap().len(), 16);
}

#[test]
fn classify_csv_and_prime_check() {
    let o = run(&["classify", "--family", "D", "--ell", "5", "--format", "csv", "--prime-check", "11"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 13);
    assert!(text.contains("closed form 60, enumeration 60: ok"));
}

#[test]
fn incompatible_order_exits_2() {
    let o = run(&["classify", "--family", "B", "--ell", "6"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["classify", "--ell", "4"])), 1);
    assert_eq!(code(&run(&["classify", "--family", "Q", "--ell", "4"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn dimension_examples() {
    let v = json_of(&["dimension", "--rank", "2", "--ell", "3", "--x", "1", "--y", "2", "--scope", "full", "--format", "json"]);
    assert_eq!(v["counted"], 81);
    assert_eq!(v["formula"], 81);
    let v = json_of(&["dimension", "--rank", "3", "--ell", "4", "--x", "0", "--y", "1", "--scope", "borel", "--format", "json"]);
    assert_eq!(v["counted"], 1024);
    assert_eq!(code(&run(&["dimension", "--rank", "9", "--ell", "8", "--x", "0", "--y", "1"])), 2);
    // r = s
    assert_eq!(code(&run(&["dimension", "--rank", "2", "--ell", "4", "--x", "1", "--y", "1"])), 2);
}

#[test]
fn skew_examples() {
    let v = json_of(&["skew", "--rank", "2", "--ell", "4", "--x", "0", "--y", "1", "--g", "1", "--h", "w1", "--format", "json"]);
    assert_eq!(v["dimension"], 2);
    let v = json_of(&["skew", "--rank", "2", "--ell", "6", "--x", "1", "--y", "4", "--g", "1", "--h", "w1^2", "--format", "json"]);
    assert_eq!(v["dimension"], 2);
    let basis: Vec<String> = serde_json::from_value(v["basis"].clone()).unwrap();
    assert!(basis.iter().any(|b| b.contains("e1^2")));
    let o = run(&["skew", "--rank", "2", "--ell", "4", "--x", "0", "--y", "1", "--g", "w1", "--h", "w1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("dim P_{w1, w1} = "));
    assert_eq!(code(&run(&["skew", "--rank", "2", "--ell", "4", "--x", "0", "--y", "1", "--g", "e1", "--h", "1"])), 1);
}

#[test]
fn yd_dist_order_4_pairs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let a = run(&["yd-dist", "--rank", "3", "--ell", "4", "--x", "0", "--y", "1", "--cache", d, "--jobs", "2"]);
    let b = run(&["yd-dist", "--rank", "3", "--ell", "4", "--x", "1", "--y", "2", "--cache", d]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("total: 256 (expected 256)"));
    let c = run(&["yd-dist", "--rank", "3", "--ell", "4", "--x", "1", "--y", "3", "--cache", d]);
    assert_ne!(stdout(&a).lines().next(), stdout(&c).lines().next());
}

#[test]
fn yd_dist_json_and_missing_reference() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = json_of(&["yd-dist", "--rank", "2", "--ell", "5", "--x", "1", "--y", "2", "--cache", d, "--compare-paper", "--format", "json"]);
    assert_eq!(v["total"], 25);
    assert_eq!(v["comparison"]["available"], false);
}

#[test]
fn cache_is_byte_stable_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["yd-dist", "--rank", "3", "--ell", "3", "--x", "1", "--y", "2", "--cache", d];
    let first = run(&args);
    let path = dir.path().join("distribution-A3-L3-x1-y2-borel.json");
    let bytes = std::fs::read(&path).unwrap();
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    std::fs::write(&path, b"{ not json").unwrap();
    let third = run(&args);
    assert_eq!(code(&third), 0);
    assert_eq!(stdout(&first), stdout(&third));
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["classify", "--family", "A", "--ell", "8", "--format", "json"],
        vec!["classify", "--family", "C", "--ell", "7", "--format", "csv"],
        vec!["skew", "--rank", "3", "--ell", "3", "--x", "1", "--y", "2", "--g", "1", "--h", "w1"],
    ] {
        assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    }
}
