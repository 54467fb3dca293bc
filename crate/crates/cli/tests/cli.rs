use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qdeform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdeform")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn theta_of_sec7_is_zero() {
    let out = qdeform(&["theta", data("sec7.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    for t in v["theta"].as_array().unwrap() {
        assert!(t.as_array().unwrap().iter().all(|c| c == "0"));
    }
}

#[test]
fn twist_dual_feeds_theta() {
    let dir = std::env::temp_dir().join(format!("qdeform-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let derived = dir.join("sec7-derived.json");
    let out = qdeform(&["twist-dual", data("sec7-twist.json").to_str().unwrap(), "--out", derived.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&derived).unwrap()).unwrap();
    let hand: Value = serde_json::from_str(&std::fs::read_to_string(data("sec7.json")).unwrap()).unwrap();
    assert_eq!(written["relations"], hand["relations"]);
    let a = json(&qdeform(&["theta", derived.to_str().unwrap()]));
    let b = json(&qdeform(&["theta", data("sec7.json").to_str().unwrap()]));
    assert_eq!(a["theta"], b["theta"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn koszul_of_abelian3_is_clean() {
    let out = qdeform(&["koszul", data("abelian3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["clean"], true);
    assert_eq!(v["complex"]["n"], 3);
}

#[test]
fn reports_are_byte_identical() {
    for args in [["koszul", "sec7.json"], ["hochschild", "sec7.json"], ["poincare", "scaled5.json"]] {
        let path = data(args[1]);
        let a = qdeform(&[args[0], path.to_str().unwrap()]);
        let b = qdeform(&[args[0], path.to_str().unwrap()]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{}", args[0]);
    }
}

#[test]
fn hochschild_and_center_reports() {
    let v = json(&qdeform(&["hochschild", data("sec7.json").to_str().unwrap()]));
    assert_eq!(v["psi_identity"], true);
    assert_eq!(v["h1_removed"], true);
    let v = json(&qdeform(&["center", "--gauge", "--degree", "2", data("sec7.json").to_str().unwrap()]));
    let profile: Vec<Vec<u64>> = serde_json::from_value(v["free_profile"].clone()).unwrap();
    assert_eq!(profile, vec![vec![0, 0, 0, 0, 0], vec![1, 0, 0, 0, 0], vec![2, 0, 0, 0, 0]]);
}

#[test]
fn text_format_and_link() {
    let out = qdeform(&["--format", "text", "link", data("abelian2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn failed_check_exits_one() {
    let out = qdeform(&["confluence", fixture("nonconfluent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["clean"], false);
}

#[test]
fn operational_errors_exit_two() {
    let out = qdeform(&["theta", "/nonexistent/p.json"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = std::env::temp_dir().join(format!("qdeform-bad-{}.json", std::process::id()));
    std::fs::write(&bad, "{\"name\": 3").unwrap();
    let out = qdeform(&["theta", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1, column"));
    std::fs::remove_file(&bad).ok();

    let out = qdeform(&["--trunc", "2", "theta", data("sec7.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation order 2"));

    let out = qdeform(&["--degree", "0", "center", data("sec7.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
