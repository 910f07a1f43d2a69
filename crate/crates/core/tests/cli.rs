use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bundlescope");
const STAGES: [&str; 6] = ["synth", "ingest", "extract", "bundle", "analyze", "report"];

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) {
    std::fs::write(
        dir.join("run.toml"),
        "seed = 11\n\n[paths]\nout = \"res\"\n\n[extract]\nn_shuffles = 200\n\n[bundle]\nn_shuffles = 200\nrestarts = 4\n\n\
         [analyze]\nn_null = 200\n\n[synth]\ndays = 300\nn_routinary = 60\nn_rare = 40\n",
    )
    .unwrap();
}

#[test]
fn stages_chain_and_emit_every_table() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    for s in STAGES {
        let o = run(&[s, "--config", "run.toml"], dir.path());
        assert!(o.status.success(), "{s}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let out = dir.path().join("res");
    for f in [
        "synth/messages.jsonl",
        "ingest/matrix.bin",
        "extract/classifications.csv",
        "bundle/network.csv",
        "bundle/bundles.csv",
        "bundle/bundle_summary.csv",
        "analyze/ccf_bundle_1.csv",
        "analyze/granger.csv",
        "analyze/dominance.csv",
        "analyze/contingency.txt",
        "analyze/attention.csv",
        "analyze/regression.txt",
        "report/ccf_bundle_1.svg",
        "report/dominance.svg",
        "report/attention.svg",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let header = std::fs::read_to_string(out.join("analyze/dominance.csv")).unwrap();
    assert!(header.starts_with("date,z_c,z_vix,delta_c,delta_vix\n"));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["stages"].as_object().unwrap().len(), 6);
    assert_eq!(manifest["stages"]["bundle"]["seed"], 11);
    assert!(manifest["stages"]["bundle"]["inputs"]["ingest/matrix.bin"].is_string());
}

#[test]
fn rerun_is_idempotent_and_flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    for s in &STAGES[..3] {
        assert!(run(&[s, "--config", "run.toml"], dir.path()).status.success());
    }
    let first = std::fs::read(dir.path().join("res/extract/classifications.csv")).unwrap();
    assert!(run(&["extract", "--config", "run.toml"], dir.path()).status.success());
    assert_eq!(
        first,
        std::fs::read(dir.path().join("res/extract/classifications.csv")).unwrap()
    );

    assert!(run(
        &["synth", "--config", "run.toml", "--seed", "12", "--out", "other"],
        dir.path()
    )
    .status
    .success());
    let a = std::fs::read(dir.path().join("res/synth/index.csv")).unwrap();
    let b = std::fs::read(dir.path().join("other/synth/index.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn exit_codes_separate_config_data_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["synth"], dir.path()).status.code(), Some(2));
    std::fs::write(
        dir.path().join("bad.toml"),
        "seed = 1\n[bundle]\nmethod = \"louvain\"\n",
    )
    .unwrap();
    let o = run(&["synth", "--config", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bundle.method"));
    assert_eq!(run(&["frobnicate", "--seed", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(&["synth", "--seed", "1", "--threads", "0"], dir.path())
            .status
            .code(),
        Some(2)
    );

    let o = run(&["bundle", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bundlescope ingest"));
}

#[test]
fn tampered_intermediate_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    for s in &STAGES[..2] {
        assert!(run(&[s, "--config", "run.toml"], dir.path()).status.success());
    }
    let m = dir.path().join("res/ingest/matrix.bin");
    let mut bytes = std::fs::read(&m).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    std::fs::write(&m, bytes).unwrap();
    let o = run(&["extract", "--config", "run.toml"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("digest"));
}
