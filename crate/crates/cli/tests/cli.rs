use std::process::{Command, Output};

fn qcw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcw")).args(args).env_remove("QCW_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn passing_run_exits_zero() {
    let out = qcw(&["coin", "flip", "--bits", "3", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
}

#[test]
fn failing_check_exits_one() {
    // too few samples for the hiding projection to look uniform
    let out = qcw(&["commit", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qcw(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qcw(&["coin", "force", "--target", "zz"]).status.code(), Some(2));
    assert_eq!(qcw(&["ssscommit", "--sigma", "0", "--trials", "1"]).status.code(), Some(2));
    assert_eq!(qcw(&["pa", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn seed_flag_and_env_override() {
    let a = qcw(&["--json", "coin", "flip", "--bits", "4", "--trials", "5", "--seed", "3"]);
    let b = qcw(&["--json", "coin", "flip", "--bits", "4", "--trials", "5", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_qcw"))
        .args(["--json", "coin", "flip", "--bits", "4", "--trials", "5", "--seed", "9"])
        .env("QCW_SEED", "3")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 3);
    assert_eq!(json(&env)["records"], json(&a)["records"]);
}

#[test]
fn force_records_hit_target() {
    let out =
        qcw(&["--json", "coin", "force", "--target", "0b", "--target-bits", "4", "--side", "alice", "--trials", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    for r in doc["records"].as_array().unwrap() {
        assert_eq!(r["outcome"], "0b");
        assert_eq!(r["aborted"], false);
    }
}

#[test]
fn zkpk_reads_adjacency_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, "[[1,4],[0,2],[1,3],[2,4],[3,0]]").unwrap();
    let p = path.to_str().unwrap();
    let out = qcw(&["zkpk", "run", "--sigma", "3", "--graph", p, "--trials", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&path, "[[1],[0]").unwrap();
    assert_eq!(qcw(&["zkpk", "run", "--graph", p]).status.code(), Some(2));
}

#[test]
fn out_file_holds_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = qcw(&["iqzk", "--trials", "50", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "iqzk");
    assert_eq!(doc["passed"], true);
}

#[test]
fn single_criterion() {
    let out = qcw(&["--json", "suite", "--criterion", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["id"], 3);
}
