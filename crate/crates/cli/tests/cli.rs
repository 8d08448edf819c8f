//! End-to-end tests against the compiled binary: exit codes, report
//! shape, config precedence, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_semibrick-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SEMIBRICK_LAB_CEILING")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("semibrick-lab-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn bijection_on_a2_standard_passes() {
    let out = run(&[
        "verify-bijection",
        "--preset",
        "a2",
        "--p",
        "2",
        "--bound",
        "2,2",
        "--structure",
        "standard",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "semibrick-lab/report/v1");
    assert_eq!(doc["command"], "verify-bijection");
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["payload"]["semibricks"].as_array().unwrap().len(), 5);
    assert_eq!(doc["payload"]["wide_subcats"].as_array().unwrap().len(), 5);
    assert_eq!(
        doc["payload"]["roundtrip_failures"].as_array().unwrap().len(),
        0
    );
    assert_eq!(doc["universe"]["class_count"], 14);
}

#[test]
fn corollary_on_a2_split_finds_witness() {
    // No --bound: the default is 2 at every vertex.
    let out = run(&[
        "verify-corollary",
        "--preset",
        "a2",
        "--p",
        "2",
        "--structure",
        "split",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    let p = &doc["payload"];
    assert_eq!(p["abelian"], false);
    assert_eq!(p["simples_semibrick"], false);
    let w = &p["simple_non_iso"];
    assert!(w.is_object(), "expected a non-isomorphism witness");
    let simples = p["simples"].as_array().unwrap();
    assert!(simples.contains(&w["source"]));
    assert!(simples.contains(&w["target"]));
}

#[test]
fn semibrick_count_on_a1_bound_three() {
    let out = run(&["semibricks", "--preset", "a1", "--p", "2", "--bound", "3"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["payload"]["count"], 2);
    assert_eq!(doc["payload"]["semibricks"].as_array().unwrap().len(), 2);
}

#[test]
fn reports_are_byte_identical_across_workers_and_runs() {
    let base = [
        "verify-bijection",
        "--preset",
        "a1",
        "--bound",
        "3",
        "--structure",
        "split",
    ];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &["--workers", "4"]].concat());
    let again = run(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout, "worker count leaked into report");
    assert_eq!(four.stdout, again.stdout, "report not reproducible");
}

#[test]
fn composite_characteristic_is_a_usage_error() {
    let out = run(&["semibricks", "--preset", "a1", "--p", "6"]);
    assert_eq!(code(&out), 2);
    let doc = stdout_json(&out);
    assert_eq!(doc["error"]["kind"], "config");
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = run(&["universe", "--preset", "z9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_quiver_is_a_usage_error() {
    let out = run(&["universe"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn tiny_ceiling_exhausts_the_budget() {
    let out = run(&["verify-bijection", "--preset", "a1", "--ceiling", "1"]);
    assert_eq!(code(&out), 3);
    let doc = stdout_json(&out);
    assert_eq!(doc["error"]["kind"], "budget");
}

#[test]
fn ceiling_env_applies_and_flag_overrides_it() {
    let via_env = Command::new(BIN)
        .args(["verify-bijection", "--preset", "a1"])
        .env("SEMIBRICK_LAB_CEILING", "1")
        .output()
        .expect("binary runs");
    assert_eq!(code(&via_env), 3);

    let flag_wins = Command::new(BIN)
        .args(["verify-bijection", "--preset", "a1", "--ceiling", "65536"])
        .env("SEMIBRICK_LAB_CEILING", "1")
        .output()
        .expect("binary runs");
    assert_eq!(code(&flag_wins), 0);
}

#[test]
fn config_file_merges_under_flags() {
    let cfg = tmp_path("merge.json");
    std::fs::write(&cfg, r#"{"preset": "a1", "bound": [3]}"#).unwrap();
    let cfg_arg = cfg.to_str().unwrap();

    let from_file = run(&["universe", "--config", cfg_arg]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(stdout_json(&from_file)["universe"]["class_count"], 4);

    let flag_wins = run(&["universe", "--config", cfg_arg, "--bound", "1"]);
    assert_eq!(code(&flag_wins), 0);
    assert_eq!(stdout_json(&flag_wins)["universe"]["class_count"], 2);

    std::fs::remove_file(&cfg).ok();
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = tmp_path("bad-key.json");
    std::fs::write(&cfg, r#"{"preset": "a1", "bonud": [3]}"#).unwrap();
    let out = run(&["universe", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn out_flag_redirects_the_report() {
    let path = tmp_path("report.json");
    let out = run(&[
        "universe",
        "--preset",
        "a1",
        "--bound",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty(), "stdout must stay silent with --out");
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(&path).expect("report file")).unwrap();
    assert_eq!(doc["schema"], "semibrick-lab/report/v1");
    std::fs::remove_file(&path).ok();
}

#[test]
fn custom_quiver_flags_build_a_universe() {
    let out = run(&[
        "universe",
        "--vertices",
        "1,2",
        "--arrows",
        "10:1:2",
        "--bound",
        "1,1",
    ]);
    assert_eq!(code(&out), 0);
    // 0, two simples, the indecomposable extension, and the semisimple sum.
    assert_eq!(stdout_json(&out)["universe"]["class_count"], 5);
}

#[test]
fn filt_rejects_non_semibrick_generators() {
    let out = run(&["filt", "--preset", "a2", "--gens", "1,2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn filt_certifies_every_closure_member() {
    let out = run(&["filt", "--preset", "a2", "--gens", "1,3"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    let closure = doc["payload"]["closure"].as_array().unwrap();
    let certs = doc["payload"]["certificates"].as_array().unwrap();
    assert_eq!(closure.len(), 14);
    assert_eq!(certs.len(), closure.len());
}

#[test]
fn wide_check_distinguishes_wide_from_not() {
    let wide = run(&["wide-check", "--preset", "a2", "--members", "0,1,2"]);
    assert_eq!(code(&wide), 0);

    // Sum-closed in the window but not factorization-closed.
    let not_wide = run(&["wide-check", "--preset", "a2", "--members", "2"]);
    assert_eq!(code(&not_wide), 1);
    let doc = stdout_json(&not_wide);
    assert_eq!(doc["verdict"], "FAIL");
    assert!(
        !doc["payload"]["factorization_failures"]
            .as_array()
            .unwrap()
            .is_empty()
    );

    // Not even additively closed: rejected before any checking starts.
    let invalid = run(&["wide-check", "--preset", "a2", "--members", "1,3"]);
    assert_eq!(code(&invalid), 2);
}

#[test]
fn split_example_reports_structure_dependence() {
    let out = run(&["split-example", "--preset", "a2"]);
    assert_eq!(code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["payload"]["split_closure"].as_array().unwrap().len(), 9);
}

#[test]
fn selftest_passes_and_echoes_no_universe_config() {
    let out = run(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    assert!(doc["config"]["quiver"].is_null());
    let checks = doc["payload"]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 7);
    assert!(checks.iter().all(|c| c["passed"] == true));
}
