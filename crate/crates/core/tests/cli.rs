use std::fs;
use std::process::{Command, Output};

use tempfile::tempdir;

fn sst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sst")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_merge_passes() {
    let o = sst(&["verify-merge", "--m", "5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("k = 4: mass 3/8, ratio 3/8, constant true"));
}

#[test]
fn verify_merge_json() {
    let o = sst(&["verify-merge", "--m", "3", "--n", "2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], 3);
    assert_eq!(v["forward_agrees"], true);
}

#[test]
fn bad_merge_sizes_are_errors() {
    assert_eq!(sst(&["verify-merge", "--m", "1", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn verify_sst_exit_codes() {
    let ok = sst(&["verify-sst", "--n", "3", "--t-cap", "8"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = sst(&["verify-sst", "--n", "4", "--t-cap", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("given P = {1,2,3,4}"));
    let coin = sst(&["verify-sst", "--n", "4", "--t-cap", "5", "--tie-break", "coin"]);
    assert_eq!(coin.status.code(), Some(0));
    let guarded = sst(&["verify-sst", "--n", "5", "--t-cap", "2"]);
    assert_eq!(guarded.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(sst(&["bogus"]).status.code(), Some(2));
    let dir = tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = sst(&[
        "simulate", "--n", "5", "--trials", "3", "--scheme", "merge", "--walk", "nonlazy", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempdir().unwrap();
    for format in ["json", "csv"] {
        let paths: Vec<_> = ["a", "b"].iter().map(|s| dir.path().join(format!("{s}.{format}"))).collect();
        for (p, threads) in paths.iter().zip(["1", "3"]) {
            let o = sst(&[
                "simulate", "--n", "12", "--trials", "40", "--seed", "9", "--format", format, "--threads", threads,
                "--out", p.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0));
        }
        assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
    }
}

#[test]
fn analysis_commands_read_output() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let path = csv.to_str().unwrap();
    let o = sst(&["simulate", "--n", "6", "--trials", "200", "--seed", "1", "--format", "csv", "--out", path]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("trial,seed,n,scheme,T,t_third,final_cycle_type"));
    assert_eq!(text.lines().count(), 201);

    let stats = sst(&["phase-stats", "--in", path]);
    assert_eq!(stats.status.code(), Some(0));
    assert!(stdout(&stats).contains("n = 6, trials = 200"));

    let curve = sst(&["sep-curve", "--in", path, "--grid", "0,1000"]);
    assert_eq!(curve.status.code(), Some(0));
    assert_eq!(stdout(&curve), "t,tail\n0,1\n1000,0\n");

    // Too few trials for the chi-square cells.
    assert_eq!(sst(&["uniformity", "--in", path]).status.code(), Some(2));
    assert_eq!(sst(&["phase-stats", "--in", "/nonexistent/x.csv"]).status.code(), Some(2));
}

#[test]
fn tables_print() {
    let o = sst(&["tables"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("1/192"));
    assert!(s.contains("1/6720"));
}
