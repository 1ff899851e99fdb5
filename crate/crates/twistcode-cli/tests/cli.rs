use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twistcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistcode")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn derive_lists_two_unpaired_modes() {
    let out = twistcode(&["derive"]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["schema"], 1);
    assert_eq!(rep["version"], twistcode::VERSION);
    assert_eq!(rep["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(rep["results"]["unpaired"].as_array().unwrap().len(), 2);
    let pair = &rep["results"]["pairs"][0];
    assert_eq!(pair["reduced"], "X10 Y11 Y12 Z13 Z20 X21");
    assert_eq!(pair["reduced_weight"], 6);
}

#[test]
fn derive_text_report() {
    let out = twistcode(&["derive", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("unpaired modes"));
    assert!(text.contains("reduced                    X10 Y11 Y12 Z13 Z20 X21"));
    assert!(text.trim_end().ends_with("passed"));
}

#[test]
fn two_braids_always_flip() {
    let out = twistcode(&["stats", "--n-braids", "2", "--shots", "10000", "--seed", "9"]);
    assert!(out.status.success());
    let row = &json(&out)["results"]["rows"][0];
    assert_eq!(row["n_braids"], 2);
    assert_eq!(row["frequency"], 1.0);
    assert_eq!(row["flips"], 10000);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "kind = \"stats\"\nseed = 5\nshots = 300\nn-braids = [1, 3]\n");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, workers) in [(&a, "1"), (&b, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_twistcode"))
            .args(["stats", "--config", &cfg, "--out", p.to_str().unwrap()])
            .env("TWISTCODE_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rep: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(rep["config"]["seed"], 5);
    assert_eq!(rep["config"]["n-braids"], serde_json::json!([1, 3]));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.toml", "seed = 5\nshots = 300\nn-braids = [0]\n");
    let rep = json(&twistcode(&["stats", "--config", &cfg, "--seed", "6"]));
    assert_eq!(rep["config"]["seed"], 6);
    assert_eq!(rep["config"]["shots"], 300);
}

#[test]
fn malformed_config_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("never.json");
    let out_arg = out_path.to_str().unwrap();
    for body in ["shots = \"many\"\n", "bogus = 1\n", "kind = \"derive\"\n", "shots = 0\n", "[lattice]\nwidth = 8\nheight = 6\nsegments = [{ row = 0, col_start = 1, col_end = 5 }]\n"] {
        let cfg = write(dir.path(), "bad.toml", body);
        let out = twistcode(&["stats", "--config", &cfg, "--out", out_arg]);
        assert_eq!(out.status.code(), Some(1), "{body}");
        assert!(out.stdout.is_empty());
        assert!(!out_path.exists());
    }
    assert_eq!(twistcode(&["stats", "--config", "/nonexistent.toml"]).status.code(), Some(1));
    assert_eq!(twistcode(&["stats", "--format", "yaml"]).status.code(), Some(1));
}

#[test]
fn csv_tables_carry_version_and_hash() {
    let out = twistcode(&["stats", "--shots", "100", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "schema");
    assert_eq!(&header[1], "version");
    assert_eq!(&header[2], "config_hash");
    assert_eq!(rdr.records().count(), 4);
}

#[test]
fn verify_suite_passes() {
    let out = twistcode(&["verify", "--shots", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out);
    assert_eq!(rep["passed"], true);
    assert!(rep["results"]["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn mbb_trace_ends_in_a_braid() {
    for backend in ["anyon", "fock"] {
        let out = twistcode(&["mbb", "--backend", backend, "--seed", "11"]);
        assert!(out.status.success());
        let rep = json(&out);
        assert_eq!(rep["results"]["fidelity"], 1.0);
        assert_eq!(rep["results"]["steps"].as_array().unwrap().len(), 5);
    }
    assert_eq!(twistcode(&["mbb", "--backend", "lattice"]).status.code(), Some(1));
}

#[test]
fn oracle_check_on_small_lattice() {
    let out = twistcode(&["oracle-check", "--shots", "100", "--sequence-length", "6"]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["results"]["sites"], 16);
    assert_eq!(rep["results"]["per_seed_mismatches"], 0);
}

#[test]
fn failing_invariant_exits_2() {
    // Seed 394 draws the same outcome ten times in a row.
    let out = twistcode(&["stats", "--shots", "10", "--n-braids", "1", "--seed", "394"]);
    assert_eq!(out.status.code(), Some(2));
    let rep = json(&out);
    assert_eq!(rep["passed"], false);
    assert!(rep["failures"][0].as_str().unwrap().contains("1 braids"));
}
