use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn jetcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetcalc")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).display().to_string()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn check_identities_passes_and_records_seed() {
    let out = jetcalc(&["check-identities", "--n", "2", "--k", "2", "--seed", "7", "--count", "20", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["passed"], true);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for want in ["spencer_bracket/jacobi", "spencer_bracket/lift_independence", "form_complex/d_squared_zero"] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn prolong_flat_scenario() {
    let out = jetcalc(&["prolong", "--scenario", &scenario("flat2d.json"), "--kmax", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["dims"], serde_json::json!([3, 3, 3, 3]));
}

#[test]
fn prolong_generic_metric_fails_with_witness() {
    let out = jetcalc(&["prolong", "--builtin", "generic-metric-2d", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "surjective_3_2");
    assert!(failed[0]["witness"].is_string());
}

#[test]
fn klein_projective_has_order_two_and_ghost() {
    let out = jetcalc(&["klein", "--builtin", "projective", "--n", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["data"]["order"], 2);
    assert_eq!(r["data"]["ghost_dim"], 1);
}

#[test]
fn klein_scenario_file() {
    let out = jetcalc(&["klein", "--scenario", &scenario("projective-line.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["data"]["ghost_dim"], 0);
}

#[test]
fn bracket_and_forms_scenarios_pass() {
    assert_eq!(jetcalc(&["bracket", "--scenario", &scenario("bracket-n2-k1.json")]).status.code(), Some(0));
    assert_eq!(jetcalc(&["forms", "--scenario", &scenario("forms-n2-k1-r1.json")]).status.code(), Some(0));
    assert_eq!(jetcalc(&["check-identities", "--scenario", &scenario("identities-n2-k2.json")]).status.code(), Some(0));
}

#[test]
fn schema_errors_exit_two_with_path() {
    let dir = std::env::temp_dir().join(format!("jetcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"schema_version":1,"n":2,"task":{"kind":"forms","k":1,"r":"one","degree":1}}"#).unwrap();
    let out = jetcalc(&["forms", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("task.r"));
    std::fs::write(&bad, r#"{"schema_version":1,"n":2,"task":{"kind":"forms","k":1,"r":1,"degree":1}}"#).unwrap();
    let out = jetcalc(&["prolong", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn resource_bound_exits_three() {
    let out = jetcalc(&["klein", "--builtin", "gl2-projective", "--depth", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_writes_identical_report() {
    let dir = std::env::temp_dir().join(format!("jetcalc-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = jetcalc(&["extension", "--builtin", "jetgroup-ext-n1-k3-m2", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn timing_is_opt_in() {
    let plain = report(&jetcalc(&["klein", "--builtin", "affine-line", "--json"]));
    assert!(plain.get("timing_ms").is_none());
    let timed = report(&jetcalc(&["klein", "--builtin", "affine-line", "--json", "--timing"]));
    assert!(timed["timing_ms"].is_u64());
}

#[test]
fn list_builtins_is_stable_and_complete() {
    let a = jetcalc(&["list-builtins", "--json"]);
    let b = jetcalc(&["list-builtins", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for want in [
        "flat-metric-2d",
        "sphere-metric-2d",
        "generic-metric-2d",
        "standard-symplectic-2d",
        "nonclosed-2form-4d",
        "affine-line",
        "projective-line",
        "gl2-projective",
        "jetgroup-ext-n1-k3-m2",
    ] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn builtin_for_wrong_command_is_usage_error() {
    assert_eq!(jetcalc(&["klein", "--builtin", "flat-metric-2d"]).status.code(), Some(2));
}

#[test]
fn jet_group_extension_builtin_reports_splitting_verdict() {
    let out = jetcalc(&["extension", "--builtin", "jetgroup-ext-n1-k3-m2", "--json"]);
    let r = report(&out);
    assert_eq!(r["data"]["kernel_abelian"], true);
    let split = r["data"]["split"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if split { 1 } else { 0 }));
}
