//! End-to-end runs of the `qel` binary.

use std::path::Path;
use std::process::{Command, Output};

fn qel(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qel"))
        .args(args)
        .current_dir(dir)
        .env_remove("QEL_SEED")
        .output()
        .expect("spawn qel")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn ssa_suite_passes_and_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = qel(
        &["check", "--suite", "ssa", "--dims", "2,2,2", "--trials", "10", "--seed", "7", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let records: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(records.len(), 10);
    assert!(records.iter().all(|r| r["pass"] == true && r["checker"] == "ssa"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("min slack"), "{stderr}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["check", "--trials", "0"],
        vec!["check", "--suite", "nope"],
        vec!["check", "--suite", "ssa", "--dims", "2,2"],
        vec!["check", "--suite", "ssa", "--tol", "0"],
        vec!["check", "--format", "xml", "--trials", "1", "--suite", "pinsker"],
        vec!["explore", "nope"],
        vec!["explore", "cmi-petz", "--trials", "0"],
        vec!["markov", "missing.json"],
        vec!["replay", "missing.json"],
        vec!["bogus-subcommand"],
    ] {
        assert_eq!(code(&qel(&args, dir.path())), 2, "{args:?}");
    }
}

#[test]
fn seed_env_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["check", "--suite", "pinsker", "--trials", "3", "--format", "csv"];
    let run = |seed: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qel"));
        cmd.args(base).args(["--seed", seed]).current_dir(dir.path());
        match env {
            Some(v) => cmd.env("QEL_SEED", v),
            None => cmd.env_remove("QEL_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run("1", Some("5")), run("5", None));
    assert_ne!(run("1", None), run("5", None));
}

#[test]
fn csv_report_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check", "--suite", "ssa,trotter,audenaert", "--trials", "4", "--seed", "3", "--out", "r.csv"];
    assert_eq!(code(&qel(&args, dir.path())), 0);
    let first = std::fs::read(dir.path().join("r.csv")).unwrap();
    assert_eq!(code(&qel(&args, dir.path())), 0);
    assert_eq!(first, std::fs::read(dir.path().join("r.csv")).unwrap());

    let mut reader = csv::Reader::from_reader(first.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..4], ["checker", "dims", "seed", "trial"]);
    assert_eq!(&header[header.len() - 2..], ["slack", "pass"]);
    assert!(header[4..header.len() - 2].iter().all(|h| h.starts_with("quantity:")));
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| &r[header.len() - 1] == "true"));
}

#[test]
fn failure_dumps_replayable_worst_instance() {
    let dir = tempfile::tempdir().unwrap();
    // An identity check cannot meet a tolerance far below rounding error.
    let out = qel(
        &["check", "--suite", "bsw", "--trials", "5", "--tol", "1e-300", "--out", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    let dump = dir.path().join("r.json.worst.json");
    let inst: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(inst["checker"], "bsw");
    assert_eq!(inst["states"][0]["dims"], serde_json::json!([2, 2, 2]));

    let replay = qel(&["replay", dump.to_str().unwrap()], dir.path());
    assert_eq!(code(&replay), 1);
    let records: Vec<serde_json::Value> = serde_json::from_slice(&replay.stdout).unwrap();
    let report: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let trial = inst["trial"].as_u64().unwrap() as usize;
    assert_eq!(records[0]["slack"], report[trial]["slack"]);

    let via_flag = qel(&["check", "--replay", dump.to_str().unwrap()], dir.path());
    assert_eq!(via_flag.stdout, replay.stdout);
}

#[test]
fn markov_spec_command() {
    let dir = tempfile::tempdir().unwrap();
    let good = r#"{"d_a": 2, "d_c": 2, "seed": 4,
        "blocks": [{"p": 0.3, "d_bl": 1, "d_br": 2}, {"p": 0.7, "d_bl": 2, "d_br": 1}]}"#;
    std::fs::write(dir.path().join("good.json"), good).unwrap();
    let out = qel(&["markov", "good.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 4, 2]));
    assert!(v["verdict"]["quantities"]["cmi"].as_f64().unwrap().abs() < 1e-10);

    let product = r#"{"d_a": 2, "d_c": 3, "blocks": [{"p": 1.0, "d_bl": 1, "d_br": 1}]}"#;
    std::fs::write(dir.path().join("product.json"), product).unwrap();
    let out = qel(&["markov", "product.json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["r_log", "r_petz", "r_mm_dag", "r_m_dag_m"] {
        assert!(v["verdict"]["quantities"][key].as_f64().unwrap() < 1e-9, "{key}");
    }

    let bad = r#"{"d_a": 2, "d_c": 2, "blocks": [{"p": 1.0, "d_bl": 2, "d_br": 1,
        "rho_a_bl": {"dims": [2], "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}}]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    assert_eq!(code(&qel(&["markov", "bad.json"], dir.path())), 2);
    std::fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(code(&qel(&["markov", "junk.json"], dir.path())), 2);
}

#[test]
fn trotter_table_for_product_state() {
    let dir = tempfile::tempdir().unwrap();
    let d = 8;
    let re: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { (i + 1) as f64 / 36.0 } else { 0.0 }).collect())
        .collect();
    let state = serde_json::json!({"dims": [2, 2, 2], "re": re, "im": vec![vec![0.0; d]; d]});
    std::fs::write(dir.path().join("s.json"), state.to_string()).unwrap();
    let out = qel(&["trotter", "--state", "s.json", "--nmax", "64"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#') && !l.contains("t_n")).collect();
    assert_eq!(rows.len(), 7);
    let ts: Vec<f64> = rows
        .iter()
        .map(|r| r.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    // A diagonal state is classical: every t_n equals Tr Ω.
    assert!(ts.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12), "{ts:?}");
}

#[test]
fn explore_emits_histogram_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = qel(
        &["explore", "cmi-petz", "--trials", "200", "--seed", "9", "--out", "e.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let ex: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e.json")).unwrap()).unwrap();
    assert_eq!(ex["completed"], 200);
    let counts: u64 = ex["histogram"]["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counts, 200);
    let replay = qel(&["replay", "e.json.worst.json"], dir.path());
    assert_eq!(code(&replay), 0);
    let v: serde_json::Value = serde_json::from_slice(&replay.stdout).unwrap();
    assert_eq!(v["slack"], ex["min_slack"]);

    let markov = qel(
        &["explore", "cmi-petz", "--ensemble", "markov", "--trials", "20", "--out", "m.json"],
        dir.path(),
    );
    assert_eq!(code(&markov), 0);
    let ex: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert!(ex["min_slack"].as_f64().unwrap().abs() < 1e-7);
}
