use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn cremona(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cremona"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON value")
}

#[test]
fn check_quadratic_type() {
    let o = cremona(&["check", "--type", "2;1,1,1", "--json"], "");
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["noether_inequality"], true);
    assert_eq!(v["sum_of_squares"]["holds"], true);
    assert_eq!(v["sum"]["holds"], true);
    assert_eq!(v["homaloidal"], true);
}

#[test]
fn factor_identity_is_empty() {
    let o = cremona(&["factor", "--type", "1;", "--json"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["trace"], serde_json::json!([]));
}

#[test]
fn factor_quadratic_json() {
    let o = cremona(&["factor", "--type", "2;1,1,1", "--json", "--verify"], "");
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let links: Vec<&str> = v["trace"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["link"].as_str().unwrap())
        .collect();
    assert_eq!(links, ["A", "B", "B", "AInv"]);
    assert_eq!(v["verify"]["recompose"], true);
}

#[test]
fn factor_map_from_stdin_with_polynomial_check() {
    let map = r#"{"degree":2,"polys":["y*z","x*z","x*y"]}"#;
    let o = cremona(&["factor", "--map", "-", "--json", "--verify"], map);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json_out(&o);
    assert_eq!(v["input"]["n"], 2);
    assert_eq!(v["verify"]["polynomial"]["linear_residual"], true);
    assert_eq!(v["verify"]["polynomial"]["quadratic_factors"].as_array().unwrap().len(), 1);
}

#[test]
fn degree_of_de_jonquieres() {
    let o = cremona(&["degree", "--type", "3;2,1,1,1,1", "--json"], "");
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["mu"], "1");
    assert_eq!(v["lambda"], "2");
    assert_eq!(v["e"], 1);
}

#[test]
fn compose_involution_with_itself() {
    let dir = tempdir();
    let path = dir.join("sigma.json");
    std::fs::write(&path, r#"{"degree":2,"polys":["y*z","x*z","x*y"]}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = cremona(&["compose", "--map", p, "--map", p], "");
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["degree"], 1);
    assert_eq!(v["polys"], serde_json::json!(["x", "y", "z"]));
}

#[test]
fn corpus_is_deterministic_json_lines() {
    let args = ["corpus", "--seed", "7", "--k", "3", "--height", "3"];
    let a = cremona(&args, "");
    let b = cremona(&args, "");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<Value> = String::from_utf8(a.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["type"]["n"], 1);
    for l in &lines {
        assert_eq!(l["map"]["degree"], l["type"]["n"]);
    }
}

#[test]
fn fano3_report() {
    let o = cremona(
        &["fano3", "--n", "4", "--r", "4", "--hcube", "1", "--curves", "15:2,16:2", "--points", "3,2"],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["curve_threshold"], "1");
    assert_eq!(v["point_threshold"], "2");
    assert_eq!(v["curve_degree_bound"], 16);
    assert_eq!(v["curves"][0]["open"], true);
    assert_eq!(v["curves"][1]["open"], false);
    assert_eq!(v["case2_open"], true);
    assert_eq!(v["case3_open"], false);
}

#[test]
fn domain_error_is_typed_json() {
    let o = cremona(&["factor", "--type", "2;1,1"], "");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_out(&o)["error"]["kind"], "NotHomaloidal");

    let o = cremona(&["compose", "--map", "-", "--map", "-"], "{}");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_out(&o)["error"]["kind"], "Parse");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cremona(&["factor"], "").status.code(), Some(2));
    assert_eq!(cremona(&["nonsense"], "").status.code(), Some(2));
    assert_eq!(cremona(&["corpus", "--seed", "x", "--k", "1", "--height", "2"], "").status.code(), Some(2));
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("cremona-cli-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
