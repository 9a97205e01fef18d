use std::path::PathBuf;
use std::process::{Command, Output};

fn schrolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schrolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("schrolab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn indices_succeeds() {
    let out = schrolab(&["indices", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stdout.is_empty());
}

#[test]
fn short_sweep_is_a_usage_error() {
    let out = schrolab(&["bessel", "--sweep", "3:4:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_is_a_usage_error() {
    assert_eq!(schrolab(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(schrolab(&["indices", "--bogus"]).status.code(), Some(2));
}

#[test]
fn out_of_range_input_is_a_usage_error() {
    assert_eq!(schrolab(&["counterexample:highp", "--n", "1", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn failed_verdict_exits_one() {
    // No preasymptotic slope is exact to 1e-6.
    let out = schrolab(&["bessel", "--sweep", "3:10", "--slope-tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("merge.json");
    std::fs::write(&cfg, r#"{"command": "propagate", "seed": 1, "samples": 3}"#).unwrap();
    let base = scratch("merge");
    let out = schrolab(&["--config", cfg.to_str().unwrap(), "--seed", "5", "--out", base.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(base.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["experiment"], "propagate");
    assert_eq!(json["config"]["seed"], "5");
    assert_eq!(json["config"]["samples"], "3");
    let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
    assert!(csv.starts_with("quantity,parameter,measured"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = scratch("bad.json");
    std::fs::write(&cfg, r#"{"command": "indices", "colour": 3}"#).unwrap();
    assert_eq!(schrolab(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_is_byte_identical_across_runs() {
    let a = scratch("run-a");
    let b = scratch("run-b");
    for base in [&a, &b] {
        let out = schrolab(&["propagate", "--seed", "9", "--samples", "6", "--out", base.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |p: &PathBuf| std::fs::read(p.with_extension("csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
