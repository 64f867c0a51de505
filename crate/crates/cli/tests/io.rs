//! Config-loading and artifact-emission contracts: rejection messages carry
//! field paths, runs are byte-deterministic, and manifests list every file
//! they hash.

use std::fs;
use std::path::{Path, PathBuf};

use conewave_cli::commands;
use conewave_cli::config::load_config;
use conewave_cli::CliError;

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).expect("write config");
    path
}

fn small_run_body() -> String {
    String::from(
        r#"{
  "n": 4, "algebra": "abelian", "mode": "linear",
  "dr": 0.125, "r_max": 16.0, "cfl": 0.25, "t_end": 2.0,
  "gamma": 0.5, "mu": -0.25, "q0": 1.0,
  "level": 2, "cadence": 8,
  "data": [ { "component": "Phi", "amplitude": 1.0,
              "profile": { "kind": "bump", "r0": 4.0, "width": 2.0 } } ]
}"#,
    )
}

fn config_message(err: CliError) -> String {
    match err {
        CliError::Config(m) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn unknown_top_level_keys_are_rejected_by_name() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "bad.json",
        r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25,
             "bogus_key": 1 }"#,
    );
    let msg = config_message(load_config(&path).unwrap_err());
    assert!(
        msg.contains("bogus_key"),
        "rejection must name the offending key: {msg}"
    );
}

#[test]
fn unknown_nested_keys_report_their_full_path() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "bad.json",
        r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25,
             "data": [ { "component": "Phi", "amplitude": 1.0,
                         "profile": { "kind": "bump", "r0": 3.0,
                                      "width": 1.0, "sharpness": 2 } } ] }"#,
    );
    let msg = config_message(load_config(&path).unwrap_err());
    assert!(
        msg.contains("data[0].profile"),
        "rejection must carry the nested field path: {msg}"
    );
    assert!(msg.contains("sharpness"), "rejection must name the key: {msg}");
}

#[test]
fn nonzero_interior_growth_exponent_is_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "bad.json",
        r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25,
             "delta": 0.1 }"#,
    );
    let msg = config_message(load_config(&path).unwrap_err());
    assert!(
        msg.contains("pinned to 0"),
        "delta rejection must explain the pinned exponent: {msg}"
    );
}

#[test]
fn horizons_that_exhaust_the_grid_are_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "bad.json",
        r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 40.0, "gamma": 0.5, "mu": -0.25 }"#,
    );
    let msg = config_message(load_config(&path).unwrap_err());
    assert!(
        msg.contains("r_max - 4 dr"),
        "horizon rejection must state the admissible bound: {msg}"
    );
}

#[test]
fn misspelled_enum_variants_are_rejected() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "bad.json",
        r#"{ "n": 4, "algebra": "so3", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 1.0, "gamma": 0.5, "mu": -0.25 }"#,
    );
    let msg = config_message(load_config(&path).unwrap_err());
    assert!(
        msg.contains("algebra") && msg.contains("so3"),
        "unknown algebra must be named in the rejection: {msg}"
    );
}

#[test]
fn empty_data_runs_emit_an_all_zero_series() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(
        dir.path(),
        "zero.json",
        r#"{ "n": 4, "algebra": "abelian", "mode": "linear", "dr": 0.125,
             "r_max": 16.0, "t_end": 2.0, "gamma": 0.5, "mu": -0.25,
             "level": 1, "cadence": 8 }"#,
    );
    let cfg = load_config(&path).expect("load");
    let out = dir.path().join("out");
    let outcome = commands::run(&cfg, &out, 0).expect("run");
    assert_eq!(outcome.status, "completed");

    let series = fs::read_to_string(out.join("series.csv")).expect("series");
    let mut lines = series.lines();
    assert_eq!(
        lines.next(),
        Some("t,e_0,e_1,t_tan,residual,flux"),
        "header must list one energy column per hierarchy level"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6, "malformed row: {line}");
        for col in &cols[1..] {
            assert_eq!(
                col.parse::<f64>().expect("numeric column"),
                0.0,
                "zero data must stay identically zero: row {line}"
            );
        }
        rows += 1;
    }
    assert!(rows > 1, "the series must contain ledger rows");
}

#[test]
fn repeated_runs_emit_byte_identical_artifacts() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(dir.path(), "run.json", &small_run_body());
    let cfg = load_config(&path).expect("load");

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    commands::run(&cfg, &out_a, 3).expect("first run");
    commands::run(&cfg, &out_b, 3).expect("second run");

    for rel in ["series.csv", "reports/run.json", "manifest.json"] {
        let a = fs::read(out_a.join(rel)).expect("read a");
        let b = fs::read(out_b.join(rel)).expect("read b");
        assert_eq!(a, b, "{rel} must be byte-identical across repeated runs");
    }
}

#[test]
fn manifest_lists_artifacts_and_hashes_their_content() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(dir.path(), "run.json", &small_run_body());
    let cfg = load_config(&path).expect("load");
    let out = dir.path().join("out");
    commands::run(&cfg, &out, 0).expect("run");

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).expect("manifest"))
            .expect("manifest json");
    assert_eq!(manifest["tool"], "conewave");
    assert_eq!(manifest["subcommand"], "run");
    assert_eq!(manifest["status"], "completed");
    assert!(manifest["failure"].is_null());
    assert_eq!(manifest["cone_band_width"], 4.0);
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .expect("outputs array")
        .iter()
        .map(|v| v.as_str().expect("path"))
        .collect();
    assert_eq!(outputs, ["series.csv", "reports/run.json"]);
    for rel in outputs {
        assert!(out.join(rel).is_file(), "{rel} listed but missing on disk");
    }
    let hash = manifest["content_hash"].as_str().expect("hash");
    assert!(
        hash.starts_with("sha256:") && hash.len() == 7 + 64,
        "content hash must be a prefixed sha256 hex digest: {hash}"
    );
    let labels = manifest["truncation_labels"].as_array().expect("labels");
    assert_eq!(labels.len(), conewave_core::TRUNCATION_LABELS.len());

    // The config echo must round-trip the input file.
    assert_eq!(manifest["config"]["dr"], 0.125);
    assert_eq!(manifest["config"]["data"][0]["component"], "Phi");
}

#[test]
fn every_report_embeds_the_truncation_labels() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = write_cfg(dir.path(), "run.json", &small_run_body());
    let cfg = load_config(&path).expect("load");
    let out = dir.path().join("out");
    commands::run(&cfg, &out, 0).expect("run");

    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("reports/run.json")).expect("report"))
            .expect("report json");
    let labels: Vec<&str> = report["truncation_labels"]
        .as_array()
        .expect("labels array")
        .iter()
        .map(|v| v.as_str().expect("label"))
        .collect();
    assert_eq!(labels, conewave_core::TRUNCATION_LABELS);
}

#[test]
fn aborted_runs_still_emit_a_manifest_with_the_failure() {
    let dir = tempfile::tempdir().expect("tempdir");
    // Unit-amplitude coupled data violates the smallness regime quickly.
    let path = write_cfg(
        dir.path(),
        "big.json",
        r#"{ "n": 4, "algebra": "su2", "mode": "coupled", "dr": 0.125,
             "r_max": 32.0, "cfl": 0.3, "t_end": 20.0, "gamma": 0.5,
             "mu": -0.25, "q0": 2.0, "level": 0, "cadence": 8,
             "data": [
               { "component": "A_t", "amplitude": 1.0, "basis": 0,
                 "profile": { "kind": "bump", "r0": 7.0, "width": 4.0 } },
               { "component": "A_r", "amplitude": 1.0, "basis": 1,
                 "profile": { "kind": "bump", "r0": 7.0, "width": 4.0 } } ] }"#,
    );
    let cfg = load_config(&path).expect("load");
    let out = dir.path().join("out");
    let outcome = commands::run(&cfg, &out, 0).expect("aborted runs still emit");
    let failure = outcome.failure.expect("failure record");
    assert_eq!(failure.kind, "numerical");
    assert!(
        failure.message.contains("metric degenerated"),
        "unexpected failure: {}",
        failure.message
    );

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).expect("manifest"))
            .expect("manifest json");
    assert_eq!(manifest["failure"]["kind"], "numerical");
    assert!(out.join("series.csv").is_file(), "partial series must survive");
}
