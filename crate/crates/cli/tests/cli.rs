use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tssgeo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tssgeo"))
        .args(args)
        .current_dir(dir)
        .env("TSSGEO_ORACLE_SECS", "30")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn solved_witness_simulates_to_a_target_set() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(&tssgeo(d, &["gen", "tss", "--seed", "5", "--n", "8", "--out", "t.json"])), 0);
    assert_eq!(code(&tssgeo(d, &["solve", "--in", "t.json", "--out", "s.json"])), 0);
    let solved = read(d, "s.json");
    let witness: Vec<String> = solved["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap().to_string())
        .collect();
    assert_eq!(witness.len() as u64, solved["k_min"].as_u64().unwrap());
    let seeds = witness.join(",");
    let out = tssgeo(d, &["simulate", "--in", "t.json", "--seed-set", &seeds, "--out", "tr.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rounds = read(d, "tr.json")["rounds"].as_array().unwrap().clone();
    assert_eq!(rounds.last().unwrap().as_array().unwrap().len(), 8);
}

#[test]
fn budget_below_minimum_exits_one() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    // unanimous triangle needs two seeds
    std::fs::write(
        d.join("t.json"),
        r#"{"graph":{"n":3,"edges":[[0,1],[1,2],[0,2]]},"thresholds":[2,2,2],"k":1}"#,
    )
    .unwrap();
    let out = tssgeo(d, &["solve", "--in", "t.json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k_min"], 2);
    assert_eq!(code(&tssgeo(d, &["solve", "--in", "t.json", "--mode", "unanimous"])), 1);
    assert_eq!(code(&tssgeo(d, &["simulate", "--in", "t.json", "--seed-set", "0"])), 1);
}

#[test]
fn bad_input_exits_two() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(&tssgeo(d, &["solve", "--in", "missing.json"])), 2);
    std::fs::write(d.join("bad.json"), "{not json").unwrap();
    assert_eq!(code(&tssgeo(d, &["solve", "--in", "bad.json"])), 2);
    assert_eq!(code(&tssgeo(d, &["reduce", "nonsense", "--in", "bad.json"])), 2);
    assert_eq!(code(&tssgeo(d, &["verify", "equivalence", "--reduction", "nonsense"])), 2);
}

#[test]
fn disk_reduction_artifact_reverifies() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("k4.json"), r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#).unwrap();
    let out = tssgeo(d, &["reduce", "is2udg", "--in", "k4.json", "--k", "1", "--out", "a.json", "--svg", "a.svg"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(d.join("a.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(code(&tssgeo(d, &["verify", "equivalence", "--artifact", "a.json"])), 0);
}

#[test]
fn generated_files_feed_the_other_commands() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let steps: &[&[&str]] = &[
        &["gen", "grid", "--n", "6", "--seed", "4", "--out", "g.json", "--coords-out", "c.json"],
        &["reduce", "grid2exact2", "--in", "g.json", "--coords", "c.json", "--out", "e.json"],
        &["verify", "equivalence", "--artifact", "e.json"],
        &["gen", "grid", "--n", "6", "--seed", "4", "--unanimous", "--out", "u.json", "--coords-out", "c.json"],
        &["solve", "--in", "u.json", "--mode", "unanimous", "--coords", "c.json"],
        &["gen", "planar", "--n", "7", "--seed", "2", "--out", "p.json"],
        &["embed", "--in", "p.json", "--out", "emb.json", "--svg", "emb.svg"],
        &["gen", "sat", "--n", "2", "--seed", "1", "--out", "f.cnf"],
        &["reduce", "sat2tss", "--in", "f.cnf", "--out", "s.json"],
        &["verify", "equivalence", "--artifact", "s.json"],
        &["gen", "er", "--n", "6", "--seed", "1", "--out", "er.json"],
        &["gen", "intervals", "--n", "6", "--seed", "1", "--out", "i.json"],
    ];
    for args in steps {
        let out = tssgeo(d, args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(read(d, "er.json")["n"], 6);
    assert_eq!(read(d, "i.json")["intervals"].as_array().unwrap().len(), 6);
}

#[test]
fn campaigns_report_and_pass() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    assert_eq!(code(&tssgeo(d, &["verify", "gadgets"])), 0);
    assert_eq!(code(&tssgeo(d, &["verify", "mod6", "--g-max", "200"])), 0);
    let out = tssgeo(
        d,
        &["--workers", "1", "verify", "equivalence", "--reduction", "preprocess", "--trials", "10", "--out", "r.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = read(d, "r.json");
    assert_eq!(report["cases_run"], 10);
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
}
