//! Drives the `fwlab` binary: exit codes, reports, determinism and the
//! snapshot round trip.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fwlab(args: &[&str], out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fwlab"));
    cmd.args(&args[..1]).arg("--out").arg(out).args(&args[1..]).env_remove("FWLAB_THREADS");
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    for args in [
        &["simulate"][..],
        &["simulate", "profile=nope"],
        &["simulate", "profile=zero", "bogus=1"],
        &["simulate", "profile=zero", "n=abc"],
        &["wave", "kind=cusp", "c=1.2"],
        &["verify", "adversarial=down_jump"],
        &["verify", "profile=zero", "domain=line", "n=100"],
        &["simulate", "--preset", "no_such_preset"],
        &["simulate", "--preset", "cusp_wave"],
    ] {
        let o = fwlab(args, &out);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn invalid_thread_count_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fwlab"))
        .args(["sweep", "--preset", "viscosity", "n=200", "--out"])
        .arg(tmp.path())
        .env("FWLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn zero_profile_passes_simulate_and_verify() {
    let tmp = TempDir::new().unwrap();
    let o = fwlab(&["simulate", "profile=zero", "n=64", "T=0.1"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(tmp.path());
    assert_eq!(r["pass"], true);
    assert_eq!(r["command"], "simulate");

    let v = tmp.path().join("v");
    let o = fwlab(&["verify", "profile=zero", "domain=line", "n=800", "T=0.2"], &v);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn breaking_without_criterion_is_not_a_failure() {
    let tmp = TempDir::new().unwrap();
    let o = fwlab(&["breaking", "profile=sine", "amplitude=0.01", "offset=0", "n=64", "T=0.2"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(tmp.path());
    assert!(r["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("criterion not met")));
}

#[test]
fn adversarial_up_jump_fails_verification() {
    let tmp = TempDir::new().unwrap();
    let o = fwlab(&["verify", "--preset", "entropy_up_jump", "n=800", "steps=50"], tmp.path());
    assert_eq!(code(&o), 1);
    let r = report(tmp.path());
    let failed: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["check_name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"kruzhkov_residual"), "{failed:?}");
}

#[test]
fn outputs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["simulate", "--preset", "peakon_transport", "n=800", "T=0.3"];
    assert_eq!(code(&fwlab(&args, &a)), 0);
    assert_eq!(code(&fwlab(&args, &b)), 0);
    for name in ["report.json", "series.csv", "snapshots/meta.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn snapshots_round_trip_through_verify() {
    let tmp = TempDir::new().unwrap();
    let sim = tmp.path().join("sim");
    let o = fwlab(&["verify", "profile=riemann", "left=1", "right=-1", "width=0.05", "n=1600", "T=0.5"], &sim);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let direct = report(&sim);

    let again = tmp.path().join("again");
    let input = format!("input={}", sim.join("snapshots").display());
    let o = fwlab(&["verify", &input], &again);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let reread = report(&again);
    let (d, r) = (&direct["results"]["entropy"], &reread["results"]["entropy"]);
    assert_eq!(d["weak_residual_max"], r["weak_residual_max"]);
    assert_eq!(d["oleinik_margin"], r["oleinik_margin"]);
    let kd = d["kruzhkov_min"]["value"].as_f64().unwrap();
    let kr = r["kruzhkov_min"]["value"].as_f64().unwrap();
    assert!((kd - kr).abs() < 1e-14, "{kd} {kr}");
}

#[test]
fn wave_writes_profile_and_defect() {
    let tmp = TempDir::new().unwrap();
    let o = fwlab(&["wave", "kind=peakon", "n=4000"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let header = fs::read_to_string(tmp.path().join("profile.csv")).unwrap();
    assert!(header.starts_with("xi,v"));
    let defect: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("defect.json")).unwrap()).unwrap();
    assert!(defect["lambda1"].as_f64().unwrap().abs() < 0.5);
}

#[test]
fn presets_list_matches_bundled_files() {
    let o = Command::new(env!("CARGO_BIN_EXE_fwlab")).arg("presets").output().unwrap();
    assert_eq!(code(&o), 0);
    let names = String::from_utf8(o.stdout).unwrap();
    assert!(names.lines().any(|l| l == "breaking"));
    assert!(names.lines().count() >= 10);
}
