use std::path::PathBuf;
use std::process::Command;

use clap::Parser;
use nonlocal::format::{parse_model, AnyModel};
use nonlocal_cli::{analyze, run, Body, Cli, EXIT_ASSERTION, EXIT_OK, EXIT_VALIDATION};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run_args(args: &[&str]) -> nonlocal_cli::Output {
    let cli = Cli::try_parse_from(std::iter::once("nonlocal").chain(args.iter().copied())).unwrap();
    run(&cli).unwrap()
}

fn report(args: &[&str]) -> Value {
    match run_args(args).body {
        Body::Report(r) => r,
        Body::Model(_) => panic!("expected a report"),
    }
}

#[test]
fn fixtures_match_generators() {
    let cases: [(&str, &[&str]); 7] = [
        ("pr-box.json", &["generate", "pr-box"]),
        ("deterministic.json", &["generate", "catalog", "deterministic"]),
        ("hardy-support.json", &["generate", "catalog", "hardy-support"]),
        ("table-iv-d.json", &["generate", "catalog", "table-iv-d"]),
        ("table-iv-d-uniform.json", &["generate", "catalog", "table-iv-d-uniform"]),
        ("ghz-mermin.json", &["generate", "catalog", "ghz-mermin"]),
        ("ghz3.json", &["generate", "ghz", "--n", "3"]),
    ];
    for (file, args) in cases {
        let Body::Model(text) = run_args(args).body else { panic!("{file}") };
        let on_disk = parse_model(&std::fs::read_to_string(fixture(file)).unwrap()).unwrap();
        let generated = parse_model(&text).unwrap();
        match (&on_disk, &generated) {
            (AnyModel::Float(a), AnyModel::Float(b)) => {
                for ci in 0..a.scenario().context_count() {
                    for (x, y) in a.row(ci).iter().zip(b.row(ci)) {
                        assert!((x - y).abs() < 1e-12, "{file}");
                    }
                }
            }
            _ => assert_eq!(on_disk, generated, "{file}"),
        }
    }
}

#[test]
fn ghz3_fixture_report() {
    let r = report(&["analyze", fixture("ghz3").to_str().unwrap()]);
    let yyy = r["certainty"].as_array().unwrap().iter().find(|c| c["context"] == "1,1,1").unwrap();
    assert_eq!(yyy["probability"], 1.0);
    let ws = r["witnesses"].as_array().unwrap();
    assert_eq!(ws.len(), 32);
    assert!(ws.iter().all(|w| w["paradoxical_probability"] == 0.125));
}

#[test]
fn deterministic_fixture_is_local() {
    let r = report(&["analyze", fixture("deterministic.json").to_str().unwrap()]);
    assert_eq!(r["level"], "LOCAL");
    assert_eq!(r["witnesses"], Value::Array(vec![]));
    assert_eq!(r["schema"], 1);
}

#[test]
fn support_fixtures_classify() {
    let r = report(&["classify", fixture("table-iv-d").to_str().unwrap()]);
    assert_eq!(r["level"], "LOGICAL");
    assert_eq!(r["method"], "decide_22l");
    assert_eq!(r["witnesses"].as_array().unwrap().len(), 2);
    let r = report(&["classify", fixture("hardy-support").to_str().unwrap()]);
    assert_eq!(r["nonextendable_entries"].as_array().unwrap().len(), 1);
    let r = report(&["classify", fixture("ghz-mermin").to_str().unwrap()]);
    assert_eq!(r["level"], "STRONG");
    assert_eq!(r["method"], "oracle");
}

#[test]
fn generate_write_read_analyze_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let generators: [&[&str]; 5] = [
        &["generate", "pr-box"],
        &["generate", "hardy-family", "--t", "0.6"],
        &["generate", "bell", "--angles", "0,0,1.5707963267948966,0,0.7853981633974483,0,2.356194490192345,0"],
        &["generate", "chen", "--l", "4", "--stars", "0:1,2:3"],
        &["generate", "ghz", "--n", "4"],
    ];
    for (i, args) in generators.iter().enumerate() {
        let Body::Model(text) = run_args(args).body else { panic!() };
        let path = dir.path().join(format!("m{i}.json"));
        let status = bin().args(*args).arg("--out").arg(&path).status().unwrap();
        assert!(status.success());
        let from_disk = nonlocal_cli::load_model(&path).unwrap();
        let in_memory = parse_model(&text).unwrap();
        assert_eq!(from_disk, in_memory);
        assert_eq!(analyze(&from_disk, 1e-9).unwrap(), analyze(&in_memory, 1e-9).unwrap(), "{args:?}");
    }
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let args = ["bell-anomaly", "--samples", "50", "--restarts", "2", "--seed", "5", "--json"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let path = fixture("table-iv-d-uniform");
    let args = ["analyze", path.to_str().unwrap(), "--json"];
    assert_eq!(bin().args(args).output().unwrap().stdout, bin().args(args).output().unwrap().stdout);
}

#[test]
fn chen_command_detects_generated_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chen.json");
    assert!(bin()
        .args(["generate", "chen", "--l", "3", "--stars", "all", "--out"])
        .arg(&path)
        .status()
        .unwrap()
        .success());
    let r = report(&["chen", path.to_str().unwrap()]);
    assert_eq!(r["matches"], true);
    assert_eq!(r["stars"], serde_json::json!(["0:1", "0:2", "1:2"]));
    assert_eq!(r["verified"], true);
}

#[test]
fn collapse_and_check_ns() {
    let Body::Model(text) = run_args(&["collapse", fixture("pr-box").to_str().unwrap()]).body else { panic!() };
    let AnyModel::Possibility(m) = parse_model(&text).unwrap() else { panic!() };
    assert_eq!(m.possible_count(), 8);
    let r = report(&["check-ns", fixture("table-iv-d-uniform").to_str().unwrap()]);
    assert_eq!(r["possibilistic"], true);
    assert_eq!(r["probabilistic"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": [[2,2],[2,2]], "kind": "probability", "tables": {}}"#).unwrap();
    let out = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tables[\"0,0\"]"));
    std::fs::write(&bad, "{\n  \"scenario\": [[2,2]],\n  oops\n}").unwrap();
    let out = bin().arg("analyze").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = bin().args(["generate", "hardy-family", "--t", "0.7853981633974483"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let out = bin().args(["ghz-audit", "--n", "13"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_VALIDATION));
    let out = bin().args(["ghz-audit", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(run_args(&["census-symmetric"]).exit_code, EXIT_OK);
    assert_ne!(EXIT_ASSERTION, EXIT_OK);
}

#[test]
fn epsilon_flag_changes_the_support() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, AnyModel::Float(nonlocal::catalog::table_iv_d_uniform().to_f64()).to_string_pretty()).unwrap();
    let r = report(&["analyze", path.to_str().unwrap(), "--epsilon", "0.3"]);
    assert_eq!(r["possible_entries"], 6);
    let r = report(&["analyze", path.to_str().unwrap()]);
    assert_eq!(r["possible_entries"], 10);
}
