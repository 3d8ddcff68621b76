use std::path::Path;
use std::process::{Command, Output};

use pnoc_dse::report::{Envelope, RunManifest};
use pnoc_dse::search::DesignPoint;

fn pnoc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnoc-dse"))
        .args(args)
        .current_dir(dir)
        .env_remove("PNOC_DSE_CONFIG")
        .output()
        .expect("binary runs")
}

fn error_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has a record");
    serde_json::from_str(line).expect("stderr record is JSON")
}

fn entries(dir: &Path) -> usize {
    std::fs::read_dir(dir).unwrap().count()
}

#[test]
fn sweep_csv_has_the_golden_header_and_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["sweep", "--goal", "balanced", "--profile", "clos", "--out", "t.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "profile,scheme,er_db,power_budget_db,sensitivity_dbm,n_lambda,bitrate_gbps,aggregate_gbps,\
         penalty_plus_10logn_db,laser_dbm,ber"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.starts_with("clos,")));

    let side = std::fs::read_to_string(dir.path().join("t.csv.manifest.json")).unwrap();
    let m = RunManifest::from_json(&side).unwrap();
    assert_eq!(m.verb, "sweep");
    assert_eq!(m.outputs.len(), 2);
}

#[test]
fn unknown_verb_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"]["kind"], "usage");
    assert_eq!(rec["error"]["code"], 2);
}

#[test]
fn csv_for_a_json_only_verb_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["--format", "csv", "ber", "--scheme", "ook", "--profile", "clos"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["--config", "absent.toml", "optimize", "--scheme", "ook", "--profile", "clos", "--out", "o.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"]["kind"], "config");
    assert_eq!(entries(dir.path()), 0);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[constants]\nnot_a_key = 1.0\n").unwrap();
    let out = pnoc(dir.path(), &["--config", "c.toml", "optimize", "--scheme", "ook", "--profile", "clos"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn forced_infeasible_duplet_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["ledger", "--scheme", "ook", "--profile", "clos", "--n", "64", "--baud", "30", "--out", "l.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_record(&out)["error"]["kind"], "infeasible");
    assert_eq!(entries(dir.path()), 0);
}

#[test]
fn optimize_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(dir.path(), &["optimize", "--scheme", "pam4_edac", "--profile", "swift", "--goal", "ber_optimal", "--out", "o.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("o.json")).unwrap();
    let env: Envelope<DesignPoint> = serde_json::from_str(&text).unwrap();
    assert!(env.result.feasible);
    assert_eq!(env.manifest.verb, "optimize");
    let again = serde_json::to_string_pretty(&env).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn report_reruns_a_json_artifact_bit_for_bit() {
    let first = tempfile::tempdir().unwrap();
    let out = pnoc(first.path(), &["optimize", "--scheme", "ook", "--profile", "clos", "--er", "9", "--out", "a.json"]);
    assert!(out.status.success());
    let second = tempfile::tempdir().unwrap();
    std::fs::copy(first.path().join("a.json"), second.path().join("src.json")).unwrap();
    let rerun = pnoc(second.path(), &["report", "--from", "src.json", "--out", "a.json"]);
    assert!(rerun.status.success(), "{}", String::from_utf8_lossy(&rerun.stderr));
    assert_eq!(
        std::fs::read(first.path().join("a.json")).unwrap(),
        std::fs::read(second.path().join("a.json")).unwrap()
    );
}

#[test]
fn report_reruns_a_csv_sidecar_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let first = pnoc(dir.path(), &["sweep", "--goal", "ber_optimal", "--profile", "swift", "--scheme", "pam4_ss", "--out", "s.csv"]);
    assert!(first.status.success());
    let rerun = pnoc(dir.path(), &["report", "--from", "s.csv.manifest.json"]);
    assert!(rerun.status.success(), "{}", String::from_utf8_lossy(&rerun.stderr));
    assert_eq!(rerun.stdout, std::fs::read(dir.path().join("s.csv")).unwrap());
}

#[test]
fn report_uses_the_recorded_config_not_the_current_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), "[constants]\np_max_dbm = 18.0\n").unwrap();
    let first = pnoc(dir.path(), &["--config", "c.toml", "sweep", "--goal", "balanced", "--profile", "clos", "--scheme", "ook", "--out", "s.csv"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    std::fs::remove_file(dir.path().join("c.toml")).unwrap();
    let rerun = pnoc(dir.path(), &["report", "--from", "s.csv.manifest.json"]);
    assert!(rerun.status.success());
    assert_eq!(rerun.stdout, std::fs::read(dir.path().join("s.csv")).unwrap());
    let default = pnoc(dir.path(), &["sweep", "--goal", "balanced", "--profile", "clos", "--scheme", "ook"]);
    assert_ne!(default.stdout, rerun.stdout);
}

#[test]
fn simulate_writes_json_and_a_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnoc(
        dir.path(),
        &["simulate", "--scheme", "ook", "--profile", "clos", "--load-fraction", "0.2,0.5", "--out", "r.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ladder = std::fs::read_to_string(dir.path().join("r.ladder.csv")).unwrap();
    assert_eq!(ladder.lines().count(), 3);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    let reports = v["result"]["reports"].as_array().unwrap();
    let sat = reports[0]["saturation_rate"].as_f64().unwrap();
    assert!((reports[1]["injection_rate"].as_f64().unwrap() - 0.5 * sat).abs() < 1e-15);
}
