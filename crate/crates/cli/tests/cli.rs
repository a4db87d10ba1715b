use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn hoalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoalg")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = hoalg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn counterexample_report() {
    assert_eq!(report(&["counterexample"]), serde_json::json!({"first": "-x^3", "second": "0", "pass": true}));
}

#[test]
fn bch_through_weight_three() {
    let out = hoalg(&["bch", "--cap", "3", "--out", "text"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "BCH(λ, μ) = λ + μ + 1/2 [λ,μ] + 1/12 [λ,[λ,μ]] - 1/12 [μ,[λ,μ]]");
    let r = report(&["bch", "--cap", "3"]);
    assert_eq!(r["commutators"]["[λ,μ]"], "1/2");
    assert_eq!(r["primitive"], true);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["bch", "--bogus"][..], &["no-such-command"], &["bch", "--cap", "0"], &["mc-model", "--which", "mc7"]] {
        assert_eq!(hoalg(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "m": [[0, 0, 1, "1"], [1, 1, 0, "1"]], "f": [[1, 1, 0, "1"]]}"#).unwrap();
    let bad = bad.display().to_string();
    assert_eq!(hoalg(&["deform", "--algebra", &bad, "--check", "cocycle"]).status.code(), Some(1));
    assert_eq!(hoalg(&["check-linfty", "--input", "/nonexistent.json"]).status.code(), Some(1));
    let mut alg: Value = serde_json::from_str(&std::fs::read_to_string(fixture("algebra.json")).unwrap()).unwrap();
    let entries = alg["brackets"].as_array_mut().unwrap();
    let pos = entries.iter().position(|e| e["n"] == 1 && e["inputs"][0] == "b").unwrap();
    entries.remove(pos);
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, alg.to_string()).unwrap();
    assert_eq!(hoalg(&["check-linfty", "--input", &broken.display().to_string()]).status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    for args in [&["rectify", "--seed", "3"][..], &["solve-ode", "--seed", "2"], &["deform", "--seed", "5"]] {
        assert_eq!(hoalg(args).stdout, hoalg(args).stdout, "{args:?}");
    }
}

#[test]
fn rectify_from_files() {
    let r = report(&["rectify", "--level", "1", "--algebra", &fixture("algebra.json"), "--homotopy", &fixture("homotopy.json")]);
    assert_eq!(r["pass"], true);
    assert_eq!(r, report(&["rectify", "--seed", "0"]));
}

#[test]
fn transfer_round_trips_its_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let first = report(&["transfer", "--input", &fixture("algebra.json"), "--arity-cap", "3"]);
    let c = dir.path().join("c.json");
    std::fs::write(&c, first["contraction"].to_string()).unwrap();
    let second = report(&["transfer", "--input", &fixture("algebra.json"), "--contraction", &c.display().to_string(), "--arity-cap", "3"]);
    assert_eq!(first["transferred"], second["transferred"]);
    assert_eq!(first["violation"], Value::Null);
}

#[test]
fn file_inputs() {
    assert_eq!(report(&["gauge-flow", "--input", &fixture("gauge.json")])["end_is_mc"], true);
    assert_eq!(report(&["solve-ode", "--input", &fixture("ode.json")])["coefficients"], report(&["solve-ode", "--seed", "4"])["coefficients"]);
    assert_eq!(report(&["solve-fp", "--input", &fixture("ode.json")])["schedules_agree"], true);
    assert_eq!(report(&["deform", "--algebra", &fixture("dual_numbers.json")])["associative"], true);
    assert_eq!(report(&["deform", "--algebra", &fixture("dual_numbers.json"), "--check", "cocycle"])["cocycle"], true);
    assert_eq!(report(&["check-linfty", "--input", &fixture("algebra.json"), "--arity-cap", "3"])["violation"], Value::Null);
}

#[test]
fn out_path_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = hoalg(&["counterexample", "--out", &path.display().to_string()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(written["pass"], true);
}

#[test]
fn models_and_single_criterion() {
    assert_eq!(report(&["mc-model", "--which", "mcinf1", "--cap", "3"])["checks"]["tree_sum_agrees"], true);
    assert_eq!(report(&["ls-algebra", "--cap", "4"])["d_squared_zero"], true);
    assert_eq!(report(&["dupont-verify", "--n", "2", "--degree-cap", "3"])["failures"], serde_json::json!([]));
    assert_eq!(report(&["acceptance", "--only", "5"])["pass"], true);
    assert_eq!(hoalg(&["acceptance", "--only", "15"]).status.code(), Some(1));
}
