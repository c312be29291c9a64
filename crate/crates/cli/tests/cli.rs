use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgrowth")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn brackets(root: &Value, x: f64) -> bool {
    root["lo_approx"].as_f64().unwrap() <= x + 1e-12 && x - 1e-12 <= root["hi_approx"].as_f64().unwrap()
}

#[test]
fn growth_csv_c2_c3() {
    let out = run(&["growth", "--spec", "c2*c3", "--nmax", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let sphere: Vec<u64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    // a, b, b^-1 with a^2 = b^3 = 1: spheres 1, 3, 4, 6, 8, 12, ...
    assert_eq!(sphere, [1, 3, 4, 6, 8, 12, 16, 24, 32]);
}

#[test]
fn growth_envelope_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pgl2z.csv");
    let v = json(&["growth", "--spec", "pgl2z", "--nmax", "24", "--seed", "7", "--out", csv.to_str().unwrap()]);
    assert_eq!(v["command"], "growth");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["spec"]["source"], "pgl2z");
    assert_eq!(v["spec"]["hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["generators"].as_array().unwrap().len(), 3);
    assert!(brackets(&v["result"]["root"], 1.324_717_957_244_746));
    assert!(csv.exists());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(report["result"]["sphere"], v["result"]["sphere"]);
}

#[test]
fn infinite_dihedral_has_rate_one() {
    let v = json(&["growth", "--spec", "c2*c2", "--nmax", "15"]);
    assert!(brackets(&v["result"]["root"], 1.0));
}

#[test]
fn custom_generators() {
    let v = json(&["growth", "--spec", "c2*c3", "--gens", "a, b a", "--nmax", "20"]);
    assert!(brackets(&v["result"]["root"], 1.618_033_988_749_895));
}

#[test]
fn budget_truncation_exits_3() {
    let out = run(&["growth", "--spec", "c2*c5", "--nmax", "30", "--budget", "500"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_pgl2z() {
    let a = json(&["classify", "--spec", "pgl2z", "a"]);
    assert_eq!(a["result"]["classification"]["verdict"], "elliptic");
    let bc = json(&["classify", "--spec", "pgl2z", "b c"]);
    assert_eq!(bc["result"]["classification"]["verdict"], "hyperbolic");
    assert_eq!(bc["result"]["classification"]["tau"], 2);
    let cac = json(&["classify", "--spec", "pgl2z", "c a c"]);
    assert_eq!(cac["result"]["classification"]["verdict"], "elliptic");
}

#[test]
fn fixedset_and_axis() {
    let f = json(&["fixedset", "--spec", "pgl2z", "a", "--radius", "3"]);
    assert!(f["result"]["size"].as_u64().unwrap() >= 2);
    let ax = json(&["axis", "--spec", "pgl2z", "b c", "--radius", "6"]);
    assert_eq!(ax["result"]["tau"], 2);
    assert!(ax["result"]["vertices"].as_array().unwrap().len() >= 3);
    let bad = run(&["axis", "--spec", "pgl2z", "a"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn certify_plastic_witness_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let v = json(&["certify", "--spec", "pgl2z", "b c", "a b c", "--out", path.to_str().unwrap()]);
    assert_eq!(v["result"]["status"], "certified");
    assert_eq!(v["result"]["lower_bound"]["lengths"], serde_json::json!([2, 3]));
    assert!(brackets(&v["result"]["lower_bound"]["root"], 1.324_717_957_244_746));
    let r = json(&["replay", "--spec", "pgl2z", path.to_str().unwrap()]);
    assert_eq!(r["result"]["status"], "valid");
    let wrong = run(&["replay", "--spec", "c2*c3", path.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(4));
}

#[test]
fn certify_c2_c3_sqrt2() {
    let v = json(&["certify", "--spec", "c2*c3", "a b", "a b^-1"]);
    assert!(brackets(&v["result"]["lower_bound"]["root"], std::f64::consts::SQRT_2));
}

#[test]
fn certify_duplicate_is_inconclusive() {
    let out = run(&["certify", "--spec", "pgl2z", "b c", "b c"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["status"], "inconclusive");
}

#[test]
fn certify_split_mode() {
    let v = json(&["certify", "--spec", "c2*c3", "--mode", "split", "--left", "a", "--right", "b"]);
    assert_eq!(v["result"]["status"], "certified");
}

#[test]
fn unknown_catalog_name_is_an_error() {
    let out = run(&["growth", "--spec", "no-such-group"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("catalog"));
    assert_eq!(run(&["catalog", "no-such-group"]).status.code(), Some(1));
}

#[test]
fn bad_word_is_an_error() {
    assert_eq!(run(&["classify", "--spec", "pgl2z", "q"]).status.code(), Some(1));
}

#[test]
fn catalog_lists_every_entry() {
    let v = json(&["catalog"]);
    assert_eq!(v["result"].as_array().unwrap().len(), 7);
}

#[test]
fn root_modes() {
    let p = json(&["root", "--poly", "-1,-1,0,1"]);
    assert!(brackets(&p["result"]["root"], 1.324_717_957_244_746));
    let l = json(&["root", "--lengths", "1,2"]);
    assert!(brackets(&l["result"]["root"], 1.618_033_988_749_895));
    let s = json(&["root", "--sequence", "1,2,4,8,16,32,64,128,256,512,1024,2048"]);
    assert!(brackets(&s["result"]["root"], 2.0));
    assert_eq!(run(&["root"]).status.code(), Some(1));
}

#[test]
fn spec_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c2c3.json");
    std::fs::write(
        &path,
        r#"{
  "a": {"family": "cyclic", "n": 2},
  "b": {"family": "cyclic", "n": 3},
  "generators": [
    {"name": "a", "word": [{"side": "A", "element": 1}]},
    {"name": "b", "word": [{"side": "B", "element": 1}]}
  ]
}"#,
    )
    .unwrap();
    let v = json(&["growth", "--spec", path.to_str().unwrap(), "--nmax", "20"]);
    assert!(brackets(&v["result"]["root"], std::f64::consts::SQRT_2));
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run(&["--threads", "1", "growth", "--spec", "pgl2z", "--nmax", "30", "--format", "csv"]);
    let four = run(&["--threads", "4", "growth", "--spec", "pgl2z", "--nmax", "30", "--format", "csv"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_paper_subset() {
    let out = run(&["verify-paper", "--only", "3,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("PASS")).count(), 2);
    assert_eq!(run(&["verify-paper", "--only", "99"]).status.code(), Some(1));
}
