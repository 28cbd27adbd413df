use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaindisc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn error(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().expect("exit code");
    let err = serde_json::from_slice(&out.stderr).unwrap_or(Value::Null);
    (code, err)
}

/// The report text with its `timestamp` line removed.
fn masked(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn basis_discrepancy_is_one() {
    let r = report(&["disc", "--gen", "basis:8", "--mode", "exact"]);
    assert_eq!(r["result"]["value"], 1.0);
    assert_eq!(r["exact"], true);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["config"]["source"]["gen"], "basis:8");
    assert!(r["timestamp"].as_str().unwrap().starts_with("unix:"));
}

#[test]
fn malformed_csv_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "1,2\n3,oops\n").unwrap();
    let (code, err) = error(&["disc", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "parse");
    std::fs::write(&path, "1,2\n3\n").unwrap();
    let (code, _) = error(&["disc", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn exit_codes_classify_failures() {
    assert_eq!(error(&["disc", "--gen", "random-box:3,30", "--mode", "exact"]).0, 3);
    let (code, err) = error(&["partial", "--gen", "random-signs:40,40", "--budget", "1"]);
    assert_eq!(code, 4);
    assert_eq!(err["error"]["kind"], "budget");
    assert_eq!(error(&["cover", "--gen", "basis:3", "--eps", "-1"]).0, 2);
    assert_eq!(error(&["disc", "--gen", "nope:3"]).0, 2);
    assert_eq!(error(&["disc", "--gen", "basis:3", "--constants", "zz=1"]).0, 2);
    assert_eq!(error(&["disc"]).0, 2);
}

#[test]
fn same_seed_gives_identical_reports_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..3).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    let threads = ["1", "1", "4"];
    for (p, t) in paths.iter().zip(threads) {
        let out = run(&[
            "spencer", "--gen", "random-signs:32,32", "--seed", "7", "--threads", t, "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(masked(&paths[0]), masked(&paths[1]));
    assert_eq!(masked(&paths[0]), masked(&paths[2]));
    let other = dir.path().join("other.json");
    run(&["spencer", "--gen", "random-signs:32,32", "--seed", "8", "--out", other.to_str().unwrap()]);
    assert_ne!(masked(&paths[0]), masked(&other));
}

#[test]
fn generated_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let first = run(&["generate", "--gen", "random-box:5,4", "--seed", "3", "--format", "csv"]);
    std::fs::write(&path, &first.stdout).unwrap();
    let again = run(&["generate", "--input", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(first.stdout, again.stdout);
    let a = report(&["disc", "--gen", "random-box:5,4", "--seed", "3", "--mode", "exact"]);
    let b = report(&["disc", "--input", path.to_str().unwrap(), "--mode", "exact"]);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn coloring_csv_has_one_sign_per_row() {
    let out = run(&["disc", "--gen", "basis:5", "--mode", "exact", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let signs: Vec<i8> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(signs.len(), 5);
    assert!(signs.iter().all(|s| s.abs() == 1));
}

#[test]
fn coordinate_sets_are_one_based() {
    let r = report(&["hdisc", "--gen", "basis:3"]);
    let subset: Vec<u64> = serde_json::from_value(r["result"]["subset"].clone()).unwrap();
    assert!(subset.iter().all(|&i| (1..=3).contains(&i)));
    let r = report(&["vc", "--gen", "intervals:6,6", "--eps", "0.5"]);
    assert_eq!(r["result"]["dim"], 1);
    let idx = r["result"]["witness"]["indices"][0].as_u64().unwrap();
    assert!((1..=6).contains(&idx));
}

#[test]
fn chaining_commands_report_values() {
    let r = report(&["gamma2", "--gen", "basis:2", "--strategy", "exhaustive"]);
    assert_eq!(r["exact"], true);
    assert!(r["result"]["value"].as_f64().unwrap() > 0.0);
    let r = report(&["pack", "--gen", "basis:4", "--eps", "1"]);
    assert_eq!(r["result"]["value"], 4);
    let r = report(&["cover", "--gen", "basis:4", "--eps", "2"]);
    assert_eq!(r["result"]["value"], 1);
    let r = report(&["entropy", "--a", "1"]);
    let expect = 2f64.ln() / (1.0 + 2f64.ln());
    assert!((r["result"]["ratio"].as_f64().unwrap() - expect).abs() < 1e-9);
}

#[test]
fn constants_overrides_are_echoed() {
    let r = report(&["spencer", "--gen", "random-signs:8,8", "--constants", "k1=2,c3=0.5"]);
    assert_eq!(r["constants"]["k1"], 2.0);
    assert_eq!(r["constants"]["c3"], 0.5);
    assert_eq!(r["config"]["constants"], "k1=2,c3=0.5");
}

#[test]
fn lab_config_is_parsed_strictly_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 64, "m_grid": [1, 4], "trials": 100}"#).unwrap();
    let r = report(&["lab", "orderstats", "--config", cfg.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(r["config"]["n"], 64);
    assert_eq!(r["config"]["trials"], 100);
    assert_eq!(r["result"]["mean"].as_array().unwrap().len(), 64);

    std::fs::write(&cfg, r#"{"n": 64, "bogus": 1}"#).unwrap();
    let (code, err) = error(&["lab", "orderstats", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["kind"], "config");

    let (code, _) = error(&["lab", "shrink"]);
    assert_eq!(code, 2);
}

#[test]
fn lab_experiments_run_from_inline_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"measure": "cube", "index_set": [[1, 0], [0, 1], [0.6, 0.8]], "k": 16, "m": 2, "trials": 3}"#,
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let r = report(&["lab", "decompose", "--config", path]);
    assert_eq!(r["result"]["rows"].as_array().unwrap().len(), 3);
    assert!(r["result"]["decomposition"]["reconstruction_error"].as_f64().unwrap() <= 1e-12);
    let r = report(&["lab", "isometry", "--config", path]);
    assert_eq!(r["result"]["k"], 16);
    let out = run(&["lab", "shrink", "--config", path, "--trials", "100", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("trial,constant"));
    assert_eq!(text.lines().count(), 101);
}
