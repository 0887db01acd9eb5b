use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn shiftlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("SHIFTLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_then_identity_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = shiftlab(dir.path(), &["gen", "--family", "A", "--K", "3", "--halfwidth", "1", "--out", "fam.shl1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = shiftlab(dir.path(), &["apply", "--op", "identity", "--in", "fam.shl1", "--out", "same.shl1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = fs::read(dir.path().join("fam.shl1")).unwrap();
    let b = fs::read(dir.path().join("same.shl1")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let side = json(&dir.path().join("fam.shl1.json"));
    assert_eq!(side["k_min"], 1);
}

#[test]
fn manifest_echoes_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = shiftlab(
        dir.path(),
        &["gen", "--family", "b", "--y", "25.5", "--halfwidth", "0.5", "--radius", "0.125", "--out", "b.shl1"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&dir.path().join("b.shl1.manifest.json"));
    assert_eq!(m["command"], "gen");
    let p = &m["parameters"]["gen"];
    assert_eq!(p["y"].as_f64(), Some(25.5));
    assert_eq!(p["halfwidth"].as_f64(), Some(0.5));
    assert_eq!(p["radius"].as_f64(), Some(0.125));
    assert!(m["outputs"].as_array().unwrap().len() >= 2);
}

#[test]
fn norm_of_generated_family() {
    let dir = tempfile::tempdir().unwrap();
    assert!(shiftlab(dir.path(), &["gen", "--family", "a", "--K", "3", "--halfwidth", "1", "--out", "a.shl1"]).status.success());
    let out = shiftlab(dir.path(), &["norm", "--in", "a.shl1", "--p", "2", "--q", "2", "--out", "n.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let value: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(value > 0.0);
    assert_eq!(json(&dir.path().join("n.json"))["value"].as_f64(), Some(value));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(shiftlab(dir.path(), &["verify", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(shiftlab(dir.path(), &["--help"]).status.code(), Some(0));
    fs::write(dir.path().join("junk.shl1"), b"NOPE0000000000000000").unwrap();
    let out = shiftlab(dir.path(), &["apply", "--op", "identity", "--in", "junk.shl1", "--out", "x.shl1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert_eq!(shiftlab(dir.path(), &["verify", "--suite", "nonsense"]).status.code(), Some(1));
    let out = shiftlab(dir.path(), &["verify", "--suite", "fit"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn small_sweep_writes_csv_fit_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{
        "family": "A", "p": 1, "q": 2, "t": 1, "sigma": 2,
        "k_list": [3, 4, 5], "lhs": "peetre-mixed", "rhs": "raw-mixed",
        "eta": { "halfwidth": 1.0, "floor_radius": 0.25 }
    }"#;
    fs::write(dir.path().join("s.json"), config).unwrap();
    let out = shiftlab(dir.path(), &["sweep", "--config", "s.json", "--out", "s.csv", "--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("y,K,lhs,rhs,ratio,seconds"));
    assert_eq!(lines.count(), 3);
    let fit = json(&dir.path().join("s.csv.fit.json"));
    assert!(fit["fit"]["exponent"].as_f64().unwrap().is_finite());
    assert!(dir.path().join("s.csv.manifest.json").exists());

    let again = shiftlab(dir.path(), &["sweep", "--config", "s.json", "--out", "t.csv"]);
    assert!(again.status.success());
    assert_eq!(csv, fs::read_to_string(dir.path().join("t.csv")).unwrap());
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"family": "A", "bogus": 1}"#).unwrap();
    assert_eq!(shiftlab(dir.path(), &["sweep", "--config", "bad.json"]).status.code(), Some(1));
}

#[test]
fn cz_and_ay_reports() {
    let dir = tempfile::tempdir().unwrap();
    assert!(shiftlab(dir.path(), &["gen", "--family", "a", "--K", "3", "--halfwidth", "1", "--out", "a.shl1"]).status.success());
    let out = shiftlab(dir.path(), &["cz", "--in", "a.shl1", "--alpha", "0.5", "--j-count", "1", "--out", "cz.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("cz.json"));
    assert_eq!(report["passes"], true);
    assert!(report["cubes"].is_array());

    let out = shiftlab(dir.path(), &["ay", "--K", "3,4", "--w-count", "8", "--out", "ay.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("ay.csv")).unwrap();
    assert!(csv.starts_with("y,A_y,j_min,j_max,w_count\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn out_dir_collects_default_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = shiftlab(dir.path(), &["--out-dir", "runs", "ay", "--K", "3", "--w-count", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("runs/ay.csv").exists());
    assert!(dir.path().join("runs/ay.csv.manifest.json").exists());
}
