//! End-to-end checks of the `schlafli-lab` binary: exit codes, JSON and CSV
//! emission, determinism, and the golden default report.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schlafli-lab"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn suite_exit_codes_and_json_shape() {
    let out = bin().arg("margins").output().unwrap();
    assert!(out.status.success(), "margins suite must pass");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["suite"], "margins");
    let rows = report["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["pass"], true, "row {} failed", row["id"]);
        for key in ["id", "anchor", "lhs", "rhs", "residual", "tolerance", "pass"] {
            assert!(row.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = bin().args(["lengths", "--seed", "3"]).output().unwrap();
    let b = bin().args(["lengths", "--seed", "3"]).output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout, "reports must be byte-identical");
}

#[test]
fn csv_report_has_fixed_columns() {
    let out = bin().args(["tubes", "--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "suite,check,anchor,lhs,rhs,residual,tolerance,pass");
    for line in lines {
        assert_eq!(line.split(',').count(), 8, "bad csv row {line:?}");
    }
}

#[test]
fn unknown_suite_and_bad_input_report_errors() {
    let out = bin().arg("tube").args(["--kind", "wedge", "--eps", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing --length"));

    let out = bin()
        .args(["check", "schlafli", "--in", "/nonexistent/family.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("family.json"));
}

#[test]
fn tube_values_match_closed_forms() {
    let out = bin()
        .args(["tube", "--kind", "wedge", "--eps", "1.0", "--theta", "1.5707963267948966", "--length", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let got: f64 = stdout(&out).trim().parse().unwrap();
    let want = std::f64::consts::FRAC_PI_2 * 2.0 * (2.0f64.cosh() - 1.0) / 4.0;
    assert!((got - want).abs() < 1e-15);

    let out = bin()
        .args(["tube", "--kind", "vertex", "--eps", "0.75", "--omega", "12.566370614359172"])
        .output()
        .unwrap();
    let got: f64 = stdout(&out).trim().parse().unwrap();
    let want = std::f64::consts::PI * (1.5f64.sinh() - 1.5);
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn core_expansion_value_mode() {
    let out = bin()
        .args(["core-expansion", "--vstar", "-3.141592653589793", "--lmu", "6.283185307179586", "--chi", "0", "--eps", "0.3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let got: f64 = stdout(&out).trim().parse().unwrap();
    let want = -std::f64::consts::PI * 0.3f64.cosh().powi(2);
    assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
}

#[test]
fn check_commands_on_fixtures() {
    let out = bin()
        .args(["check", "schlafli", "--in", &fixture("family-stretch.json"), "--t", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["pass"], true);
    assert_eq!(rep["stencil"]["order"], 2);

    let out = bin()
        .args(["check", "dual-schlafli", "--in", &fixture("family-stretch.json"), "--t", "-0.15"])
        .output()
        .unwrap();
    assert!(out.status.success());

    let out = bin()
        .args(["check", "smooth", "--in", &fixture("smooth-sphere.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lhs = rep["lhs"].as_f64().unwrap();
    assert!((lhs + 4.0 * std::f64::consts::PI * 0.5f64.cosh().powi(2)).abs() < 1e-6);

    let out = bin()
        .args(["check", "monotonic", "--in", &fixture("monotonic-pair.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rep["contained"], true);
    assert!(rep["margin"].as_f64().unwrap() > 0.0);

    let out = bin()
        .args(["check", "continuity", "--in", &fixture("poly-tetra.json"), "--delta", "1e-4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rep["modulus"].as_f64().unwrap() < 1e-2);
}

#[test]
fn suite_accepts_user_family() {
    let out = bin()
        .args(["schlafli", "--in", &fixture("family-stretch.json")])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ids: Vec<&str> =
        report["rows"].as_array().unwrap().iter().map(|r| r["id"].as_str().unwrap()).collect();
    assert!(ids.iter().any(|id| id.contains("user-input")));
}

#[test]
fn margin_command_reports_zero_at_identity() {
    let out = bin()
        .args(["margin", "--family", "builtin:dilation-v1", "--eps", "0.3", "--t", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rep["margin"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn loose_stencil_documents_larger_residuals() {
    // With fd_step = 1e-2 the Schläfli residuals sit near 1e-4 (O(h²) from
    // 1e-8 at h = 1e-4); the declared 1e-6 tolerance now fails, so the exit
    // code must flip while the residual column documents the scaling.
    let dir = tempdir();
    let cfg = dir.join("loose.json");
    std::fs::write(&cfg, r#"{"fd_step": 1e-2, "quad_tol": 1e-10, "seed": 0}"#).unwrap();
    let out = bin().args(["schlafli", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "loose stencil must fail the 1e-6 gate");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mut worst = 0.0f64;
    for row in report["rows"].as_array().unwrap() {
        if row["id"].as_str().unwrap().contains("/t=") {
            worst = worst.max(row["residual"].as_f64().unwrap());
        }
    }
    assert!(
        (1e-6..1e-2).contains(&worst),
        "expected ~1e-4 residuals at h = 1e-2, got {worst:e}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("schlafli-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn thread_cap_env_does_not_change_the_report() {
    let default = bin().arg("tubes").output().unwrap();
    let single = bin().arg("tubes").env("SCHLAFLI_LAB_THREADS", "1").output().unwrap();
    let quad = bin().arg("tubes").env("SCHLAFLI_LAB_THREADS", "4").output().unwrap();
    assert!(default.status.success() && single.status.success() && quad.status.success());
    assert_eq!(default.stdout, single.stdout);
    assert_eq!(default.stdout, quad.stdout);
}

#[test]
fn golden_all_report_is_stable() {
    let golden_text =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/all_report.json"))
            .unwrap();
    let golden: serde_json::Value = serde_json::from_str(&golden_text).unwrap();
    let out = bin().arg("all").output().unwrap();
    assert!(out.status.success());
    let fresh: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();

    let grows = golden["rows"].as_array().unwrap();
    let frows = fresh["rows"].as_array().unwrap();
    assert_eq!(grows.len(), frows.len(), "row count drifted");
    for (g, f) in grows.iter().zip(frows) {
        assert_eq!(g["id"], f["id"], "row ordering drifted");
        assert_eq!(g["pass"], f["pass"], "pass flag drifted at {}", g["id"]);
        let tol = g["tolerance"].as_f64().unwrap().max(1e-12);
        for key in ["lhs", "rhs", "residual"] {
            let gv = g[key].as_f64().unwrap();
            let fv = f[key].as_f64().unwrap();
            assert!(
                (gv - fv).abs() <= tol.max(1e-9 * gv.abs()),
                "{} drifted at {}: {gv} vs {fv}",
                key,
                g["id"]
            );
        }
    }
}
