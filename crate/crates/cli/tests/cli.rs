use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nagata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nagata")).args(args).output().expect("binary runs")
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

const COLLINEAR: &str = r#"{"metric":"euclidean","points":[[0],[1],[2],[3],[4]]}"#;

#[test]
fn validate_accepts_a_metric() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "m.json", r#"{"metric":"matrix","d":[[0,1,2],[1,0,1],[2,1,0]]}"#);
    let out = nagata(&["validate", "--input", s(&space)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
    assert_eq!(r["passed"], true);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert!(r["params"]["validate"]["common"]["input"].is_string());
}

#[test]
fn triangle_violation_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "m.json", r#"{"metric":"matrix","d":[[0,1,5],[1,0,1],[5,1,0]]}"#);
    let out = nagata(&["validate", "--input", s(&space)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
}

#[test]
fn parse_error_exits_two_with_location() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "m.json", "{\"metric\":\"matrix\",\n \"d\": [[0,1],[1,0]");
    let out = nagata(&["validate", "--input", s(&space)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    assert!(err["message"].as_str().unwrap().contains("line 2, column"));
}

#[test]
fn missing_input_exits_two() {
    let out = nagata(&["validate", "--input", "/nonexistent/space.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subset_outside_space_exits_three() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let subset = file(dir.path(), "z.json", "[0, 9]");
    let values = file(dir.path(), "v.json", r#"{"0":[0.0],"9":[1.0]}"#);
    let out = nagata(&["extend", "--space", s(&space), "--subset", s(&subset), "--values", s(&values)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_base_is_a_parameter_error() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let subset = file(dir.path(), "z.json", "[0, 4]");
    let values = file(dir.path(), "v.json", r#"{"0":[0.0],"4":[1.0]}"#);
    let out = nagata(&[
        "extend", "--space", s(&space), "--subset", s(&subset), "--values", s(&values), "--base-r", "big",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = nagata(&[
        "extend", "--space", s(&space), "--subset", s(&subset), "--values", s(&values), "--dim", "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn extend_restricts_to_given_values() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let subset = file(dir.path(), "z.json", "[0, 4]");
    let values = file(dir.path(), "v.json", r#"{"0":[0.25,-1.0],"4":[1.0,3.0]}"#);
    let out = nagata(&[
        "extend", "--space", s(&space), "--subset", s(&subset), "--values", s(&values), "--dim", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let table = r["values"].as_array().unwrap();
    assert_eq!(table.len(), 5);
    assert_eq!(table[0], serde_json::json!([0.25, -1.0]));
    assert_eq!(table[4], serde_json::json!([1.0, 3.0]));
    assert!(r["measured_lip"].as_f64().unwrap().is_finite());
}

#[test]
fn embed_collinear_defaults() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let out = nagata(&["embed", "--input", s(&space)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!(r["report"].is_object());
    assert!(!r["trees"].as_array().unwrap().is_empty());
    assert_eq!(r["passed"], true);
}

#[test]
fn cover_reports_certified_multiplicity() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let order = file(dir.path(), "o.json", "[4,3,2,1,0]");
    let out = nagata(&["cover", "--input", s(&space), "--scale", "1", "--order", s(&order), "--check", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["multiplicity"]["method"], "exact");
    for m in r["class_multiplicity"].as_array().unwrap() {
        assert!(m["value"].as_u64().unwrap() <= 1);
    }
    let out = nagata(&["cover", "--input", s(&space), "--scale", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hierarchy_level_syntax() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let out = nagata(&["hierarchy", "--input", s(&space), "--cprime", "2", "--levels", "auto"]);
    assert_eq!(out.status.code(), Some(0));
    let out = nagata(&["hierarchy", "--input", s(&space), "--levels", "3-1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let space = file(
        dir.path(),
        "x.json",
        r#"{"metric":"euclidean","points":[[0,0],[1,0],[0,1],[3,3],[3.5,2.5],[7,1],[0.25,0.5]]}"#,
    );
    for args in [
        vec!["embed", "--input", s(&space)],
        vec!["dim-profile", "--input", s(&space), "--orders", "3", "--seed", "11"],
        vec!["hierarchy", "--input", s(&space)],
    ] {
        let a = nagata(&args);
        let b = nagata(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let space = file(dir.path(), "x.json", COLLINEAR);
    let target = dir.path().join("r.json");
    let printed = nagata(&["cover", "--input", s(&space), "--scale", "1.5"]);
    let written = nagata(&["cover", "--input", s(&space), "--scale", "1.5", "--output", s(&target)]);
    assert!(written.stdout.is_empty());
    let mut a = report(&printed);
    let mut b: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    a["params"] = Value::Null;
    b["params"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn embed_export_feeds_reduce_tree() {
    let dir = TempDir::new().unwrap();
    let space = file(
        dir.path(),
        "x.json",
        r#"{"metric":"euclidean","points":[[0,0],[1,0],[2,0],[2,1],[5,5],[5,6],[9,0],[9.5,0.5]]}"#,
    );
    let prefix = format!("{}/e_", dir.path().display());
    let out = nagata(&["embed", "--input", s(&space), "--export-prefix", &prefix]);
    assert_eq!(out.status.code(), Some(0));
    let colors = report(&out)["trees"].as_array().unwrap().len();
    for k in 0..colors {
        let tree = format!("{prefix}tree{k}.json");
        let sample = format!("{prefix}sample{k}.json");
        let out = nagata(&["reduce-tree", "--tree", &tree, "--sample", &sample, "--scale", "0.5", "--c", "2"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let r = report(&out);
        assert!(r["reduction"]["multiplicity"]["value"].as_u64().unwrap() <= 2);
    }
}
