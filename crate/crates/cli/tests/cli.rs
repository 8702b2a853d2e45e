use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sclab_core::formats::fmt_sig;
use sclab_core::oracles::{sample_complexity, Variant};
use sclab_core::pmf::distance_suite;
use sclab_core::{MemorylessSource, Pmf, Source};
use serde_json::Value;
use tempfile::TempDir;

fn sclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sclab"))
        .args(args)
        .env_remove("SCLAB_ENUM_CAP")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rounded(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap()
}

#[test]
fn div_matches_library() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.json", r#"{"p": ["1/2", "1/4", "1/4"]}"#);
    let o = sclab(&["div", "--pmf", s(&pmf)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = Pmf::new(&[0.5, 0.25, 0.25], false).unwrap();
    let suite = distance_suite(&p, &Pmf::uniform(3).unwrap()).unwrap();
    assert_eq!(v["d_half"].as_f64().unwrap(), rounded(suite.d_half));
    assert_eq!(v["kl"].as_f64().unwrap(), rounded(suite.kl));
    assert_eq!(v["tv"].as_f64().unwrap(), rounded(suite.tv));
}

#[test]
fn sc_csv_matches_library() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.txt", "0.8 0.2\n");
    let o = sclab(&["sc", "--pmf", s(&pmf), "--eps", "0.1", "--variant", "N_fl", "--n-max", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let src = Source::Memoryless(MemorylessSource::new(Pmf::new(&[0.8, 0.2], false).unwrap()));
    let r = sample_complexity(&src, 0.1, Variant::BigNFl, 50).unwrap();
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("variant,epsilon,n,criterion"));
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), r.trace.len());
    for (row, t) in rows.iter().zip(&r.trace) {
        assert_eq!(row[0], "N_fl");
        assert_eq!(row[2].parse::<usize>().unwrap(), t.n);
        assert_eq!(row[3].parse::<f64>().unwrap(), rounded(t.criterion));
    }
    assert_eq!(rows.last().unwrap()[2].parse::<usize>().ok(), r.n_found);
}

#[test]
fn audit_passes_and_writes_file() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.json", r#"{"p": [0.7, 0.3]}"#);
    let out = dir.path().join("audit.json");
    let o = sclab(&["audit", "--pmf", s(&pmf), "--eps", "0.25", "--n-max", "40", "--format", "json", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["relations"]["checks"].as_array().unwrap().len(), 12);
}

#[test]
fn validation_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.json", r#"{"p": [0.7, 0.3]}"#);
    let o = sclab(&["sc", "--pmf", s(&pmf), "--eps", "1.5", "--variant", "n_fl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--eps"));
    let o = sclab(&["sc", "--pmf", s(&pmf), "--eps", "0.1", "--variant", "n_bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--variant"));
    let bad = write(&dir, "bad.json", r#"{"p": [0.7, 0.2]}"#);
    let o = sclab(&["div", "--pmf", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--pmf"));
    assert_eq!(sclab(&["frobnicate"]).status.code(), Some(2));
    let o = sclab(&["div", "--pmf", "/nonexistent/p.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/p.json"));
}

#[test]
fn enumeration_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.json", r#"{"p": [0.4, 0.3, 0.3]}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_sclab"))
        .args(["sc", "--pmf", s(&pmf), "--eps", "0.01", "--variant", "n_fl", "--n-max", "30"])
        .env("SCLAB_ENUM_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap is 20"), "{}", stderr(&o));
}

#[test]
fn code_roundtrip_through_cli() {
    let dir = TempDir::new().unwrap();
    let pmf = write(&dir, "p.json", r#"{"p": ["7/10", "2/10", "1/10"]}"#);
    for (kind, extra) in [("optimal", vec![]), ("prefix", vec!["--rate", "1"]), ("fixed", vec!["--k", "20"])] {
        let mut args = vec!["code", "encode", kind, "--pmf", s(&pmf), "--n", "4", "0012"];
        args.extend(&extra);
        let o = sclab(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let word = v["codeword"].as_str().unwrap().to_string();
        let mut args = vec!["code", "decode", kind, "--pmf", s(&pmf), "--n", "4", &word];
        args.extend(&extra);
        let o = sclab(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["strings"][0], "0012");
    }
}

#[test]
fn operating_point_is_deterministic() {
    let args = ["universal", "point", "--m", "4", "--delta", "0.5", "--n", "40", "--trials", "300", "--seed", "9"];
    let a = sclab(&args);
    let b = sclab(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("m,delta,n,trials,reject_rate_P,reject_rate_U,seed\n4,0.5,40,300,"));
}

#[test]
fn markov_and_bounds_reports() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "x.json", r#"{"mu": ["1/2", "1/2"], "P": [["3/4", "1/4"], ["1/4", "3/4"]]}"#);
    let o = sclab(&["markov", "--markov", s(&chain), "--n", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["rate"].as_f64().unwrap() - 0.100031373).abs() < 1e-9);
    assert_eq!(v["pair_divergence"], v["rate"]);
    let o = sclab(&["bounds", "--markov", s(&chain), "--eps", "0.01"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|iv| iv["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["markov_spectral", "markov_symmetric"]);
    let o = sclab(&["bounds", "--eps", "0.125", "--delta", "0.5", "--m", "4", "--format", "csv"]);
    assert!(stdout(&o).contains("universal_upper_explicit,n_fl,,43200,true"));
}
