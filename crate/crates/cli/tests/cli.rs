use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nongauss"));
    c.env_remove("NONGAUSS_OUT_DIR");
    c
}

fn conf(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("nongauss-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn classifies_reference_tuple() {
    let out = scratch("regimes");
    let o = run(&["regime-classify", "-c", conf("regimes.conf").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("regimes.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,beta,d,k,q,q_c,q_prime,q_lo,q_hi,blowup,global_ok"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..5], &["0.9", "0.5", "1", "2", "3"]);
    assert_eq!(row[6..9].iter().map(|s| s.parse::<f64>().unwrap()).collect::<Vec<_>>(), vec![2.0, 2.0, 3.6]);
    assert_eq!(&row[9..], &["false", "true"]);
}

#[test]
fn empty_config_names_missing_field() {
    let out = scratch("empty");
    let o = run(&["regime-classify", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("params.alpha"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unknown_key_is_a_validation_error() {
    let out = scratch("unknown");
    let o = run(&[
        "osgood-table",
        "-c",
        conf("osgood.conf").to_str().unwrap(),
        "--set",
        "osgood.colour=red",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("osgood.colour"), "{}", stderr(&o));
}

#[test]
fn bad_flag_is_a_validation_error() {
    assert_eq!(run(&["simulate", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_validation_error() {
    let o = run(&["simulate", "-c", "/nonexistent/nongauss.conf"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_precondition_exits_two() {
    let out = scratch("precond");
    let o = run(&[
        "blowup-study",
        "-c",
        conf("blowup.conf").to_str().unwrap(),
        "--set",
        "params.q=3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn osgood_table_passes_and_manifest_hashes_match() {
    let out = scratch("osgood");
    let o = run(&["osgood-table", "-c", conf("osgood.conf").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest: Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "osgood-table");
    assert_eq!(manifest["exit_code"], 0);
    let listed = manifest["artifacts"].as_array().unwrap();
    assert!(listed.len() >= 2);
    for a in listed {
        let bytes = std::fs::read(out.join(a["file"].as_str().unwrap())).unwrap();
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(a["sha256"].as_str().unwrap(), hex);
        assert_eq!(a["bytes"].as_u64().unwrap(), bytes.len() as u64);
    }
    let verdict: Value = serde_json::from_slice(&std::fs::read(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "pass");
    assert!(verdict["evidence"].is_array() && verdict["policy"].is_object());
}

#[test]
fn kernel_validate_passes() {
    let out = scratch("kernel");
    let o = run(&["kernel-validate", "-c", conf("kernel.conf").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("kernel_checks.csv")).unwrap();
    assert!(csv.lines().count() > 10);
}

#[test]
fn simulate_is_deterministic() {
    let (a, b) = (scratch("sim-a"), scratch("sim-b"));
    for d in [&a, &b] {
        let o = run(&[
            "simulate",
            "-c",
            conf("simulate.conf").to_str().unwrap(),
            "--set",
            "time.steps=64",
            "-o",
            d.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["trace.csv", "u_final.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let head = std::fs::read_to_string(a.join("trace.csv")).unwrap();
    assert!(head.starts_with("t,lq_norm,weighted_norm,local_mass,residual,iters\n"));
}

#[test]
fn environment_sets_output_dir() {
    let env_dir = scratch("env");
    let o = bin()
        .args(["regime-classify", "-c", conf("regimes.conf").to_str().unwrap()])
        .env("NONGAUSS_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(env_dir.join("regimes.csv").exists());

    let flag_dir = scratch("flag");
    let o = bin()
        .args(["regime-classify", "-c", conf("regimes.conf").to_str().unwrap(), "-o", flag_dir.to_str().unwrap()])
        .env("NONGAUSS_OUT_DIR", scratch("ignored"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("regimes.csv").exists());
    assert!(!scratch("ignored").exists());
}

#[test]
fn help_lists_every_subcommand() {
    let o = run(&["--help"]);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in [
        "kernel-validate",
        "osgood-table",
        "regime-classify",
        "simulate",
        "blowup-study",
        "global-study",
        "annulus-check",
    ] {
        assert!(text.contains(sub), "{sub}");
    }
    assert!(text.contains("NONGAUSS_OUT_DIR"));
}
