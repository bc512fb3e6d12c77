use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn abelinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abelinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = abelinv(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn err_json(args: &[&str]) -> Value {
    let out = abelinv(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV with `#` metadata and a header, as float columns.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn meta(text: &str, key: &str) -> Option<String> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.to_string())
}

fn synth(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut all = vec!["synth"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", s(&out)]);
    ok(&all);
    out
}

#[test]
fn synth_poly_exact() {
    let text = ok(&["synth", "--pair", "poly", "--samples", "64"]);
    let r = rows(&text);
    assert_eq!(r.len(), 64);
    let zero = r.iter().find(|row| row[0] == 0.0).unwrap();
    assert_eq!(zero[2], 0.0);
    assert_eq!(meta(&text, "grid_kind").as_deref(), Some("uniform"));
    assert_eq!(meta(&text, "snr_db").as_deref(), Some("inf"));
}

#[test]
fn synth_reports_snr() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.csv");
    let summary: Value = serde_json::from_str(&ok(&[
        "synth", "--pair", "poly", "--samples", "64", "--epsilon", "4e-2", "--seed", "3", "--out", s(&out),
    ]))
    .unwrap();
    let snr = summary["snr_db"].as_f64().unwrap();
    assert!((snr - 23.1).abs() <= 1.5, "{snr}");
    let text = std::fs::read_to_string(&out).unwrap();
    let stored: f64 = meta(&text, "snr_db").unwrap().parse().unwrap();
    assert_eq!(stored, snr);
}

#[test]
fn synth_is_deterministic() {
    let a = ok(&["synth", "--pair", "spline", "--epsilon", "1e-2", "--seed", "9"]);
    let b = ok(&["synth", "--pair", "spline", "--epsilon", "1e-2", "--seed", "9"]);
    assert_eq!(a, b);
}

#[test]
fn synth_step_is_zero_below_the_first_jump() {
    let r = rows(&ok(&["synth", "--pair", "step", "--samples", "256"]));
    assert_eq!(r.len(), 256);
    assert!(r.iter().filter(|row| row[1] < 0.2).all(|row| row[2] == 0.0));
}

#[test]
fn invert_exact_poly_data() {
    let dir = TempDir::new().unwrap();
    let input = synth(&dir, "p.csv", &["--pair", "poly", "--samples", "64"]);
    let stem = path(&dir, "out");
    ok(&["invert", "--in", s(&input), "--out", s(&stem)]);
    let recon = std::fs::read_to_string(path(&dir, "out.recon.csv")).unwrap();
    let r = rows(&recon);
    assert_eq!(r.len(), 201);
    let worst = r.iter().map(|row| (row[1] - (5.0 * row[0] * row[0] - 4.0 * row[0])).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst}");

    let report: Value = serde_json::from_str(&std::fs::read_to_string(path(&dir, "out.report.json")).unwrap()).unwrap();
    assert_eq!(report["selection_rule"], "min-discrepancy");
    assert_eq!(report["snr_db"], "inf");
    let exp: Value = serde_json::from_str(&std::fs::read_to_string(path(&dir, "out.expansion.json")).unwrap()).unwrap();
    assert_eq!(exp["coeffs"].as_array().unwrap().len(), report["chosen_n"].as_u64().unwrap() as usize + 1);
}

#[test]
fn invert_noisy_poly_selects_in_the_expected_range() {
    let dir = TempDir::new().unwrap();
    let input = synth(&dir, "p.csv", &["--pair", "poly", "--samples", "64", "--epsilon", "4e-2", "--seed", "0"]);
    let report: Value = serde_json::from_str(&ok(&["invert", "--in", s(&input)])).unwrap();
    let n = report["chosen_n"].as_u64().unwrap();
    assert!((9..=17).contains(&n), "chosen_n = {n}");
}

#[test]
fn invert_fixed_and_a_priori() {
    let dir = TempDir::new().unwrap();
    let input = synth(&dir, "p.csv", &["--pair", "spline", "--samples", "128"]);
    let r: Value = serde_json::from_str(&ok(&["invert", "--in", s(&input), "--select", "fixed", "--ncap", "20"])).unwrap();
    assert_eq!(r["chosen_n"], 20);
    let r: Value = serde_json::from_str(&ok(&[
        "invert", "--in", s(&input), "--select", "a-priori", "--epsilon", "1e-3", "--k", "4", "--c", "2",
    ]))
    .unwrap();
    assert_eq!(r["chosen_n"], 11);
    let e = err_json(&["invert", "--in", s(&input), "--select", "fixed", "--ncap", "70"]);
    assert_eq!(e["error"]["kind"], "aliasing");
    let e = err_json(&["invert", "--in", s(&input), "--select", "morozov", "--epsilon", "0"]);
    assert_eq!(e["error"]["kind"], "invalid_parameter");
}

#[test]
fn invert_empty_file_is_a_structured_error() {
    let dir = TempDir::new().unwrap();
    let empty = path(&dir, "empty.csv");
    std::fs::write(&empty, "").unwrap();
    let e = err_json(&["invert", "--in", s(&empty)]);
    assert_eq!(e["error"]["kind"], "parse");
    let e = err_json(&["invert", "--in", s(&path(&dir, "missing.csv"))]);
    assert_eq!(e["error"]["kind"], "io");
}

#[test]
fn forward_examples() {
    let r = rows(&ok(&["forward", "--pair", "poly", "--grid", "5"]));
    assert_eq!(r[0], vec![0.0, 0.0]);
    assert!((r[1][1] + 0.5).abs() <= 1e-12);

    let dir = TempDir::new().unwrap();
    let one = path(&dir, "one.json");
    std::fs::write(&one, r#"{"coeffs":[1.0]}"#).unwrap();
    let r = rows(&ok(&["forward", "--in", s(&one), "--grid", "5"]));
    assert!((r[1][1] - 1.0).abs() <= 1e-12);
    assert!(r.iter().all(|row| (row[1] - 2.0 * row[0].sqrt()).abs() <= 1e-12));
}

#[test]
fn expansion_round_trips_through_forward_input() {
    let dir = TempDir::new().unwrap();
    let input = synth(&dir, "p.csv", &["--pair", "poly"]);
    let stem = path(&dir, "r");
    ok(&["invert", "--in", s(&input), "--out", s(&stem), "--select", "fixed", "--ncap", "13"]);
    let exp = path(&dir, "r.expansion.json");
    let r = rows(&ok(&["forward", "--in", s(&exp), "--grid", "33"]));
    let worst = r
        .iter()
        .map(|row| (row[1] - 16.0 / 3.0 * (row[0].powf(2.5) - row[0].powf(1.5))).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn invert_is_repeatable_and_leaves_input_untouched() {
    let dir = TempDir::new().unwrap();
    let input = synth(&dir, "p.csv", &["--pair", "step", "--samples", "128", "--epsilon", "0.3", "--seed", "4"]);
    let first = std::fs::read_to_string(&input).unwrap();
    let a = ok(&["invert", "--in", s(&input), "--select", "fixed", "--ncap", "5"]);
    let b = ok(&["invert", "--in", s(&input), "--select", "fixed", "--ncap", "5"]);
    assert_eq!(a, b);
    assert_eq!(first, std::fs::read_to_string(&input).unwrap());
}

#[test]
fn sweep_noiseless_single_row() {
    let text = ok(&["sweep", "--pair", "poly", "--epsilon", "0"]);
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert!(r[0][3] <= 1e-8);
    assert!(text.starts_with("epsilon,snr_db,chosen_n,l2_error"));
}

#[test]
fn sweep_error_falls_with_noise() {
    let r = rows(&ok(&["sweep", "--pair", "poly", "--epsilon", "1e-1,1e-2,1e-3,1e-4", "--trials", "12"]));
    assert_eq!(r.len(), 4);
    assert!(r.windows(2).all(|w| w[1][3] < w[0][3]), "{r:?}");
    assert!(r.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn sweep_selection_at_small_noise() {
    let r = rows(&ok(&["sweep", "--pair", "poly", "--epsilon", "1e-4,3e-4,5e-4", "--trials", "10"]));
    for row in &r {
        assert!((13.0..=17.0).contains(&row[2]), "chosen_n = {}", row[2]);
    }
}

#[test]
fn verify_default_passes() {
    let v: Value = serde_json::from_str(&ok(&["verify"])).unwrap();
    assert_eq!(v["passed"], true, "{v}");
    assert!(v["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn verify_with_zero_tolerance_reports_failures() {
    let v: Value = serde_json::from_str(&ok(&["verify", "--tol-scale", "0", "--check", "noise-bound", "--check", "forward-poly"])).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_unknown_check_is_an_error() {
    let e = err_json(&["verify", "--check", "no-such-check"]);
    assert_eq!(e["error"]["kind"], "usage");
}

#[test]
fn usage_errors_are_json() {
    let e = err_json(&["synth", "--pair", "bogus"]);
    assert_eq!(e["error"]["kind"], "usage");
    let e = err_json(&["frobnicate"]);
    assert_eq!(e["error"]["kind"], "usage");
}
