use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncpres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncpres"))
        .args(args)
        .env_remove("NCPRES_CEILING")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn verify_two_generator_spec_passes() {
    let out = ncpres(&["verify", "thm1", "--len", "8", "--deg", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["ok"], true);
    let uppers: Vec<u64> = v["dims"].as_array().unwrap().iter().map(|d| d["upper"].as_u64().unwrap()).collect();
    assert_eq!(uppers, [1, 3, 6, 10, 14, 18, 22, 26, 30]);
    assert_eq!(v["coverage"]["span"], 14);
    assert_eq!(v["coverage"]["gamma"], 14);
}

#[test]
fn verify_four_generator_spec_notes_rejected_variants() {
    let out = ncpres(&["verify", "thm3", "--len", "6", "--deg", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rejected_relations"].as_array().unwrap().len(), 2);
    let notes: Vec<&str> = v["notes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(notes.iter().any(|n| n.contains("t3^3")), "{notes:?}");
    assert!(notes.iter().any(|n| n.contains("-3*t3*t4*t3*t5")), "{notes:?}");
}

fn write_broken_spec(dir: &Path) -> String {
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{
  "name": "broken",
  "variables": ["a0"],
  "relations": ["a0^2 - 1"],
  "images": { "a0": { "N": 2, "coeffs": { "0": [["0", "1"], ["0", "0"]] } } }
}"#,
    )
    .unwrap();
    format!("file:{}", path.display())
}

#[test]
fn failing_relation_exits_one_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_broken_spec(dir.path());
    let out = ncpres(&["verify", &spec, "--len", "3"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["ok"], false);
    let rel = &v["relations"][0];
    assert_eq!(rel["zero"], false);
    // a0^2 - 1 maps to the negative identity.
    assert_eq!(rel["residual"]["coeffs"]["0"], serde_json::json!([["-1", "0"], ["0", "-1"]]));

    let tsv = ncpres(&["verify", &spec, "--len", "3", "--format", "tsv"]);
    assert_eq!(code(&tsv), 1);
    assert!(String::from_utf8_lossy(&tsv.stdout).contains("false"));
}

#[test]
fn eval_prints_normalized_and_literal() {
    let out = ncpres(&["eval", "thm2", "1/2*a3*a2*a3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let c = &v["value"]["coeffs"];
    assert_eq!(c["1"], serde_json::json!([["0", "0", "0"], ["0", "1", "0"], ["0", "0", "0"]]));
    assert_eq!(c["2"], serde_json::json!([["0", "0", "0"], ["1", "0", "0"], ["0", "1", "0"]]));
    assert_eq!(c["3"], serde_json::json!([["0", "0", "0"], ["0", "0", "0"], ["1", "0", "0"]]));
}

#[test]
fn eval_with_renamed_variables() {
    let out = ncpres(&["eval", "thm1", "x^2", "--vars", "x,y"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["value"]["coeffs"].as_object().unwrap().is_empty());
}

#[test]
fn dims_table() {
    let out = ncpres(&["dims", "thm1", "--len", "5"]);
    assert_eq!(code(&out), 0);
    let uppers: Vec<u64> =
        json(&out)["dims"].as_array().unwrap().iter().map(|d| d["upper"].as_u64().unwrap()).collect();
    assert_eq!(uppers, [1, 3, 6, 10, 14, 18]);
}

#[test]
fn triples_calogero() {
    let out = ncpres(&["triples", "calogero"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["triples"][0]["equations"].as_array().unwrap().len(), 2);
}

#[test]
fn member_exit_codes() {
    let yes = ncpres(&["member", "thm1", "a0*a1^3*a0 - 3*a0*a1*a0*a1*a0", "--len", "5"]);
    assert_eq!(code(&yes), 0);
    let no = ncpres(&["member", "thm1", "a0*a1", "--len", "5"]);
    assert_eq!(code(&no), 1);
    assert_eq!(json(&no)["member"], false);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["verify", "nosuchspec"][..],
        &["eval", "thm1", "a0 +* a1"],
        &["eval", "thm1", "a9"],
        &["eval", "thm1", "x", "--vars", "x"],
        &["verify", "file:/nonexistent/spec.json"],
    ] {
        let out = ncpres(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn ceiling_exits_three() {
    let out = Command::new(env!("CARGO_BIN_EXE_ncpres"))
        .args(["verify", "thm1"])
        .env("NCPRES_CEILING", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let flag = ncpres(&["dims", "thm1", "--ceiling", "10"]);
    assert_eq!(code(&flag), 3);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["verify", "thm2", "--len", "6", "--deg", "3"];
    let a = ncpres(&args);
    let b = ncpres(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.ends_with(b"\n"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dims.json");
    let stdout = ncpres(&["dims", "thm1", "--len", "4"]);
    let file = ncpres(&["dims", "thm1", "--len", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&file), 0);
    assert_eq!(std::fs::read(&path).unwrap(), stdout.stdout);
}

#[test]
fn tsv_carries_the_json_numbers() {
    let j = json(&ncpres(&["dims", "thm2", "--len", "6"]));
    let tsv = ncpres(&["dims", "thm2", "--len", "6", "--format", "tsv"]);
    let text = String::from_utf8(tsv.stdout).unwrap();
    let block: Vec<&str> = text
        .split("\n\n")
        .find(|b| b.starts_with("# dims"))
        .expect("dims table")
        .lines()
        .skip(2)
        .collect();
    let dims = j["dims"].as_array().unwrap();
    assert_eq!(block.len(), dims.len());
    for (line, d) in block.iter().zip(dims) {
        let cells: Vec<&str> = line.split('\t').map(str::trim).collect();
        assert_eq!(cells[0], d["len"].to_string());
        assert_eq!(cells[1], d["lower"].to_string());
        assert_eq!(cells[2], d["upper"].to_string());
    }
}
