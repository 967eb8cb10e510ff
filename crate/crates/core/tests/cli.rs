use std::path::Path;
use std::process::{Command, Output};

use ae_toolkit::analytic::Classification;
use ae_toolkit::cli::{describe, Catalog};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ae-toolkit")).args(args).output().unwrap()
}

fn run(suite: &str, inputs: &Path, out: &Path) -> Output {
    bin(&["run", "--suite", suite, "--inputs", inputs.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn summary(out: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(out.join("summary.csv")).unwrap().records().map(|r| r.unwrap()).collect()
}

fn write_weights(dir: &Path, labels: &[&str]) {
    let catalog = Catalog::default();
    let weights: Vec<_> = catalog.weights.iter().filter(|w| labels.contains(&w.label.as_str())).collect();
    std::fs::write(dir.join("weights.json"), serde_json::to_string(&weights).unwrap()).unwrap();
}

#[test]
fn describe_lists_the_default_catalog() {
    let catalog = Catalog::default();
    assert!(catalog.entries().len() >= 12);
    let out = bin(&["describe"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), describe(&catalog));
}

#[test]
fn describe_empty_and_malformed_catalogs() {
    let empty = tempfile::tempdir().unwrap();
    let out = bin(&["describe", "--catalog", empty.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());

    let bad = tempfile::tempdir().unwrap();
    std::fs::write(bad.path().join("weights.json"), "[\n  {\"label\": }\n]").unwrap();
    let out = bin(&["describe", "--catalog", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("weights.json:2:"), "{err}");
}

#[test]
fn smirnov_suite_on_the_default_catalog() {
    let inputs = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("smirnov", inputs.path(), out.path()).status.code(), Some(0));
    let rows = summary(out.path());
    let exp_iz = rows.iter().find(|r| &r[0] == "smirnov/exp_iz").unwrap();
    assert_eq!(&exp_iz[1], "pass");
    assert!(exp_iz[2].contains("NotSmirnov (expected)"), "{exp_iz:?}");
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["suite"], "smirnov");
    let grid = std::fs::read_to_string(out.path().join("defect_grid.csv")).unwrap();
    assert!(grid.lines().count() > 1);
    assert!(out.path().join("norm_vs_height.csv").exists());
}

#[test]
fn ap_suite_flags_the_reciprocal_weight() {
    let inputs = tempfile::tempdir().unwrap();
    write_weights(inputs.path(), &["inv"]);
    std::fs::write(inputs.path().join("functions.json"), "{\"functions\": []}").unwrap();
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("ap", inputs.path(), out.path()).status.code(), Some(0));
    let rows = summary(out.path());
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][1], "pass");
    assert!(rows[0][2].starts_with("A2 = inf, witness ["), "{:?}", rows[0]);
}

#[test]
fn main_theorem_rows_carry_witnesses() {
    let inputs = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    assert_eq!(run("main-theorem", inputs.path(), out.path()).status.code(), Some(0));
    let catalog = Catalog::default();
    let rows = summary(out.path());
    for entry in catalog.functions.functions.iter().filter(|e| e.expected == Some(Classification::Smirnov)) {
        let row = rows.iter().find(|r| r[0].ends_with(&format!("/{}", entry.name))).unwrap();
        if row[2].starts_with("outside the hypotheses") {
            continue;
        }
        assert!(!row[5].is_empty() && !row[6].is_empty() && !row[7].is_empty(), "{row:?}");
    }
    let sqrt = rows.iter().find(|r| r[0].ends_with("/sqrt_z")).unwrap();
    let parsed: Vec<f64> = (5..8).map(|k| sqrt[k].parse().unwrap()).collect();
    assert_eq!(parsed, [2.0, 2.0, 1.0]);
}

#[test]
fn failed_expectation_exits_one() {
    let catalog = Catalog::default();
    let mut functions = catalog.functions.clone();
    functions.functions.retain(|e| e.name == "exp_iz");
    functions.functions[0].expected = Some(Classification::Smirnov);
    let inputs = tempfile::tempdir().unwrap();
    std::fs::write(inputs.path().join("functions.json"), serde_json::to_string(&functions).unwrap()).unwrap();
    let out = tempfile::tempdir().unwrap();
    let result = run("smirnov", inputs.path(), out.path());
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8(result.stderr).unwrap().contains("smirnov/exp_iz"));
}

#[test]
fn input_errors_exit_two() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("missing");
    assert_eq!(run("smirnov", &missing, out.path()).status.code(), Some(2));
    let inputs = tempfile::tempdir().unwrap();
    assert_eq!(run("nope", inputs.path(), out.path()).status.code(), Some(2));
    std::fs::write(inputs.path().join("functions.json"), "{\"functions\": [1, 2").unwrap();
    let result = run("smirnov", inputs.path(), out.path());
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8(result.stderr).unwrap().contains("functions.json:1:"));
    let tol = bin(&["run", "--suite", "ap", "--inputs", out.path().to_str().unwrap(), "--out", out.path().to_str().unwrap(), "--tol-smirnov", "-1"]);
    assert_eq!(tol.status.code(), Some(2));
}
