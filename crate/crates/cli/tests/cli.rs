use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx_sense::io::{read_labelled, write_labelled};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approx-sense"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("APPROX_SENSE_THREADS")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Parses the structured error and returns `(code, message)`.
fn error_of(out: &Output) -> (String, String) {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let v: Value = serde_json::from_str(stderr.trim()).unwrap_or_else(|_| panic!("unstructured stderr: {stderr}"));
    (
        v["error"]["code"].as_str().unwrap().to_owned(),
        v["error"]["message"].as_str().unwrap().to_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ellipse_geometry_closed_form() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["rademacher", "--geometry", fixture("ellipse.json").to_str().unwrap()], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("rademacher.json"));
    assert_eq!(v["value"].as_f64().unwrap(), 2.5);
    assert_eq!(v["method"]["kind"], "closed_form");
}

#[test]
fn zero_pointset_has_zero_complexity() {
    for method in ["exact", "mc"] {
        let tmp = TempDir::new().unwrap();
        let ps = fixture("zeros.csv");
        let out = run(&["rademacher", "--pointset", ps.to_str().unwrap(), "--method", method], tmp.path());
        assert!(out.status.success());
        assert_eq!(read_json(&tmp.path().join("rademacher.json"))["value"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn exact_and_monte_carlo_agree_on_fixture() {
    let ps = fixture("pointset.csv");
    let exact_dir = TempDir::new().unwrap();
    assert!(run(&["rademacher", "--pointset", ps.to_str().unwrap(), "--method", "exact"], exact_dir.path())
        .status
        .success());
    let mc_dir = TempDir::new().unwrap();
    let args = ["rademacher", "--pointset", ps.to_str().unwrap(), "--method", "mc", "--n-sigma", "20000", "--seed", "5"];
    assert!(run(&args, mc_dir.path()).status.success());
    let exact = read_json(&exact_dir.path().join("rademacher.json"));
    let mc = read_json(&mc_dir.path().join("rademacher.json"));
    assert_eq!(exact["method"]["kind"], "exact_enumeration");
    let se = mc["method"]["standard_error"].as_f64().unwrap();
    let gap = (exact["value"].as_f64().unwrap() - mc["value"].as_f64().unwrap()).abs();
    assert!(gap <= 4.0 * se, "gap {gap} vs 4 s.e. {}", 4.0 * se);
}

#[test]
fn exact_method_rejects_large_m() {
    let tmp = TempDir::new().unwrap();
    let header: Vec<String> = (0..23).map(|j| format!("s{j}")).collect();
    let row: Vec<&str> = vec!["0.5"; 23];
    let ps = tmp.path().join("wide.csv");
    fs::write(&ps, format!("{}\n{}\n", header.join(","), row.join(","))).unwrap();
    let out = run(&["rademacher", "--pointset", ps.to_str().unwrap(), "--method", "exact"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_of(&out).0, "enumeration_too_large");
}

#[test]
fn noiseless_on_grid_teacher_is_recovered() {
    let tmp = TempDir::new().unwrap();
    let cfg = fixture("recovery.json");
    let out = run(&["--config", cfg.to_str().unwrap(), "train"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("train.json"));
    let w: Vec<f64> = serde_json::from_value(v["output"]["hypothesis"]["weights"].clone()).unwrap();
    assert_eq!(w, vec![0.5, -0.5]);
    assert_eq!(v["output"]["objective_value"].as_f64().unwrap(), 0.0);
    assert!(v["output"]["objective_trace"].is_array());
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let cfg = fixture("recovery.json");
    let mut outputs = Vec::new();
    for threads in ["1", "2", "1"] {
        let tmp = TempDir::new().unwrap();
        let out = run(&["--config", cfg.to_str().unwrap(), "--threads", threads, "train"], tmp.path());
        assert!(out.status.success());
        outputs.push(fs::read(tmp.path().join("train.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn seed_flag_overrides_config_seed() {
    let cfg = fixture("recovery.json");
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run(&["--config", cfg.to_str().unwrap(), "generate"], a.path()).status.success());
    assert!(run(&["--config", cfg.to_str().unwrap(), "--seed", "4", "generate"], b.path()).status.success());
    let la = fs::read(a.path().join("labelled.csv")).unwrap();
    let lb = fs::read(b.path().join("labelled.csv")).unwrap();
    assert_ne!(la, lb);
    assert_eq!(read_json(&a.path().join("generate.json"))["seed"], 3);
}

#[test]
fn generated_csv_roundtrips_through_ingestion() {
    let tmp = TempDir::new().unwrap();
    let cfg = fixture("recovery.json");
    assert!(run(&["--config", cfg.to_str().unwrap(), "generate"], tmp.path()).status.success());
    let path = tmp.path().join("labelled.csv");
    let original = fs::read(&path).unwrap();
    let sample = read_labelled(&path).unwrap();
    let copy = tmp.path().join("copy.csv");
    write_labelled(&copy, &sample).unwrap();
    assert_eq!(fs::read(&copy).unwrap(), original);
    let reread = read_labelled(&copy).unwrap();
    assert_eq!(reread.inputs(), sample.inputs());
    assert_eq!(reread.targets(), sample.targets());
}

#[test]
fn csv_task_trains_from_generated_files() {
    let tmp = TempDir::new().unwrap();
    let gen = fixture("recovery.json");
    assert!(run(&["--config", gen.to_str().unwrap(), "generate"], tmp.path()).status.success());
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1,
            "task": {"csv": {"labelled": "labelled.csv", "unlabelled": "unlabelled.csv"}},
            "operator": {"kind": "uniform_quantizer", "step": 0.5, "clamp": 1.0},
            "domain": {"bound": 1.0, "dim": 2, "mode": {"kind": "grid", "points_per_axis": 5}},
            "learner": {"algorithm": "lambda_erm", "lambda": 0.5}}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "train"], &tmp.path().join("run"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("run/train.json"));
    assert_eq!(v["output"]["selection"]["kind"], "lambda");
}

#[test]
fn missing_csv_path_is_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1,
            "task": {"csv": {"labelled": "nowhere/labelled.csv"}},
            "operator": {"kind": "uniform_quantizer", "step": 0.5, "clamp": 1.0},
            "domain": {"bound": 1.0, "dim": 2, "mode": {"kind": "grid", "points_per_axis": 3}},
            "learner": {"algorithm": "constrained_erm"}}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "train"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let (code, message) = error_of(&out);
    assert_eq!(code, "io");
    assert!(message.contains("nowhere/labelled.csv"), "{message}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "{\n  \"schema_version\": 1,\n  \"sead\": 4\n}");
    let out = run(&["--config", cfg.to_str().unwrap(), "train"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let (code, message) = error_of(&out);
    assert_eq!(code, "config");
    assert!(message.contains("sead") && message.contains("line 3"), "{message}");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), r#"{"schema_version": 2}"#);
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out).0, "schema_version");
}

#[test]
fn infeasible_threshold_reports_minimum() {
    let tmp = TempDir::new().unwrap();
    // every off-origin grid point has two nonzero weights, so pruning to one always moves it
    let text = fs::read_to_string(fixture("recovery.json"))
        .unwrap()
        .replace(r#"{"kind": "uniform_quantizer", "step": 0.5, "clamp": 1.0}"#, r#"{"kind": "magnitude_pruner", "keep": 1}"#)
        .replace(r#""points_per_axis": 5"#, r#""points_per_axis": 4"#)
        .replace(r#""t": null"#, r#""t": 1e-9"#);
    let cfg = write_config(tmp.path(), &text);
    let out = run(&["--config", cfg.to_str().unwrap(), "train"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let (code, message) = error_of(&out);
    assert_eq!(code, "infeasible");
    assert!(message.contains("minimum achievable sensitivity"), "{message}");
}

#[test]
fn bound_with_zero_constituents_is_the_confidence_term() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1, "delta": 0.05,
            "bounds": [{"kind": "uniform_restricted", "emp_err": 0, "rad_ht": 0, "m": 100}]}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("bounds.json"));
    let expected = 3.0 * ((2.0f64 / 0.05).ln() / 200.0).sqrt();
    assert!((v[0]["value"].as_f64().unwrap() - expected).abs() < 1e-15);
    let table = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("name,value,delta,certified,inputs_digest,terms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1].parse::<f64>().unwrap(), v[0]["value"].as_f64().unwrap());

    // a second run appends a row without repeating the header
    assert!(run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path()).status.success());
    let table = fs::read_to_string(tmp.path().join("bounds.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn monte_carlo_constituent_clears_certified_flag() {
    let tmp = TempDir::new().unwrap();
    let ps = fixture("pointset.csv");
    assert!(run(&["rademacher", "--pointset", ps.to_str().unwrap(), "--method", "mc", "--n-sigma", "500"], tmp.path())
        .status
        .success());
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1,
            "bounds": [{"kind": "uniform_restricted", "emp_err": 0.1, "rad_ht": {"file": "rademacher.json"}, "m": 12}]}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read_json(&tmp.path().join("bounds.json"))[0]["certified"], false);
}

#[test]
fn tampered_bound_report_fails_sum_check_on_load() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("report.json"),
        r#"{"name": "x", "value": 1.0, "terms": [{"label": "a", "value": 0.25}], "delta": 0.05,
            "certified": true, "inputs_digest": "00"}"#,
    )
    .unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1,
            "bounds": [{"kind": "uniform_restricted", "emp_err": {"file": "report.json"}, "rad_ht": 0, "m": 10}]}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_of(&out).0, "inconsistent_report");
}

#[test]
fn missing_constituent_is_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"schema_version": 1, "bounds": [{"kind": "joint", "min_approx_err": 0.1, "rad_ha": 0, "t": 0.1, "m": 10}]}"#,
    );
    let out = run(&["--config", cfg.to_str().unwrap(), "bound"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let (code, message) = error_of(&out);
    assert_eq!(code, "missing_constituent");
    assert!(message.contains("`err_f_star`"), "{message}");
}

#[test]
fn sensitivity_reads_train_output() {
    let tmp = TempDir::new().unwrap();
    let base = fs::read_to_string(fixture("recovery.json")).unwrap();
    let text = base.replacen(
        "\"schema_version\": 1,",
        "\"schema_version\": 1, \"sensitivity\": {\"train_output\": \"train.json\", \"n_mc\": 2000, \"budget\": 1.0},",
        1,
    );
    let cfg = write_config(tmp.path(), &text);
    assert!(run(&["--config", cfg.to_str().unwrap(), "train"], tmp.path()).status.success());
    let out = run(&["--config", cfg.to_str().unwrap(), "sensitivity"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&tmp.path().join("sensitivity.json"));
    let kinds: Vec<&str> = v["estimates"].as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["empirical", "monte_carlo_true", "analytic_upper"]);
    // the teacher sits on the quantizer grid, so every estimate vanishes
    for e in v["estimates"].as_array().unwrap() {
        assert_eq!(e["value"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn validate_writes_identical_reports_and_passes() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["validate", "ellipse_exact", "--trials", "20", "--seed", "9"];
    let out = run(&args, a.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS] ellipse_exact"));
    assert!(run(&args, b.path()).status.success());
    let ra = fs::read(a.path().join("validate_ellipse_exact.json")).unwrap();
    assert_eq!(ra, fs::read(b.path().join("validate_ellipse_exact.json")).unwrap());
    let v: Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["trials"], 20);
    assert!(fs::read_to_string(a.path().join("coverage.csv")).unwrap().starts_with("suite,bound,trials"));
}

#[test]
fn unknown_suite_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["validate", "lemma9"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let (code, message) = error_of(&out);
    assert_eq!(code, "unknown_suite");
    assert!(message.contains("lemma9"));
}

#[test]
fn usage_errors_are_structured() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["frobnicate"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out).0, "usage");

    let out = run(&["--threads", "0", "validate", "ellipse_exact"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out).0, "usage");

    let out = run(&["train"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out).0, "missing_config_section");
}

#[test]
fn threads_env_var_is_a_fallback() {
    let tmp = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_approx-sense"))
        .args(["validate", "ellipse_exact", "--trials", "3", "--out"])
        .arg(tmp.path())
        .env("APPROX_SENSE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_approx-sense"))
        .args(["validate", "ellipse_exact", "--trials", "3", "--threads", "1", "--out"])
        .arg(tmp.path())
        .env("APPROX_SENSE_THREADS", "0")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn help_exits_zero() {
    let out = Command::new(env!("CARGO_BIN_EXE_approx-sense")).arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("rademacher"));
}
