//! End-to-end checks of the binary: output contracts and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn harmint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn bound_simpson_case_passes() {
    let out = harmint(&[
        "bound", "--thm", "22", "--fn", "square", "--a", "1", "--b", "2", "--lambda",
        "0.3333333333", "--q", "2",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("PASS"), "{text}");
    assert!(text.contains("thm22"));
}

#[test]
fn coeff_midpoint_values() {
    let out = harmint(&["coeff", "--set", "c123", "--lambda", "0", "--u", "1", "--v", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("1.442635495496"), "{text}");
    // C3 = C1 - C2 is reported alongside.
    assert!(text.contains("C3"));
}

#[test]
fn coeff_intro_needs_q_only_for_mu() {
    let out = harmint(&["coeff", "--set", "intro", "--a", "1", "--b", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("lambda1") && !text.contains("mu1"));

    let out = harmint(&["coeff", "--set", "intro", "--a", "1", "--b", "2", "--q", "2"]);
    assert!(stdout(&out).contains("mu1"));

    // mu coefficients demand q > 1.
    let out = harmint(&["coeff", "--set", "intro", "--a", "1", "--b", "2", "--q", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn lambda_fraction_syntax_is_exact() {
    let fraction = harmint(&["coeff", "--set", "c123", "--lambda", "1/3", "--u", "1", "--v", "2"]);
    let decimal = harmint(&[
        "coeff",
        "--set",
        "c123",
        "--lambda",
        "0.3333333333333333",
        "--u",
        "1",
        "--v",
        "2",
    ]);
    assert_eq!(code(&fraction), 0);
    assert_eq!(stdout(&fraction), stdout(&decimal));
}

#[test]
fn means_chain_table() {
    let out = harmint(&["means", "--a", "1", "--b", "2.718281828", "--p", "-2,2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("means.H<=G"));
    assert!(text.contains("L_-2"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn identity_reports_residual() {
    let out = harmint(&[
        "identity", "--fn", "square", "--a", "1", "--b", "2", "--lambda", "1/3",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("identity residual"));
}

#[test]
fn prop_ten_reports_discrepancy_and_passes_theorem() {
    let out = harmint(&[
        "prop", "--id", "10", "--a", "1", "--b", "2.5", "--lambda", "0.5", "--q", "2",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("DISCREPANCY"), "{text}");
    assert!(text.contains("derivative surrogate"), "{text}");
}

#[test]
fn prop_seven_requires_n() {
    let out = harmint(&["prop", "--id", "7", "--a", "1", "--b", "2", "--q", "2"]);
    assert_eq!(code(&out), 2);
    let out = harmint(&[
        "prop", "--id", "7", "--a", "1", "--b", "2", "--q", "2", "--n", "-0.5",
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
}

#[test]
fn uncertified_bound_exits_one_with_unmet() {
    let out = harmint(&[
        "bound", "--thm", "22", "--fn", "square_log", "--a", "0.3", "--b", "1", "--lambda",
        "0.5", "--q", "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("UNMET"));

    // --force evaluates anyway (and the bound happens to hold here).
    let out = harmint(&[
        "bound", "--thm", "22", "--fn", "square_log", "--a", "0.3", "--b", "1", "--lambda",
        "0.5", "--q", "1", "--force",
    ]);
    assert!(stdout(&out).contains("thm22"));
}

#[test]
fn usage_errors_exit_two() {
    let out = harmint(&["bound", "--thm", "99", "--fn", "linear", "--a", "1", "--b", "2"]);
    assert_eq!(code(&out), 2);
    let out = harmint(&["bound", "--thm", "22", "--fn", "cubic", "--a", "1", "--b", "2"]);
    assert_eq!(code(&out), 2);
    let out = harmint(&["bound", "--thm", "22", "--fn", "linear", "--a", "2", "--b", "1"]);
    assert_eq!(code(&out), 2);
    let out = harmint(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn numeric_overflow_exits_three() {
    // x^202 overflows inside the quadrature on [0.5, 1000].
    let out = harmint(&[
        "identity", "--fn", "power:200", "--a", "0.5", "--b", "1000", "--lambda", "0.5",
    ]);
    assert_eq!(code(&out), 3, "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
}

#[test]
fn csv_format_emits_parseable_rows() {
    let out = harmint(&[
        "bound", "--thm", "hh", "--fn", "square", "--a", "1", "--b", "2", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "hh13.left");
    assert_eq!(&rows[0][11], "PASS");
}

#[test]
fn sweep_runs_demo_config_and_reports() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/sweep-demo.json");
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = harmint(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("thm22"));
    assert!(text.contains("identity max residual"));

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&report_path).unwrap()).unwrap();
    let records = report["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["status"] == "pass" || r["status"] == "unmet"));
    assert!(report["summary"]["identity_max_err"].as_f64().unwrap() <= 1e-8);

    // Machine records round-trip losslessly through JSON.
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(report, reparsed);
}

#[test]
fn sweep_reports_are_byte_identical_across_runs() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/sweep-demo.json");
    let dir = tempfile::tempdir().unwrap();
    let (p1, p2) = (dir.path().join("r1.json"), dir.path().join("r2.json"));
    for p in [&p1, &p2] {
        let out = harmint(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn sweep_config_may_carry_its_own_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("from-config.json");
    let config_path = dir.path().join("config.json");
    let config = serde_json::json!({
        "functions": ["linear"],
        "intervals": { "explicit": [[1.0, 2.0]] },
        "lambdas": [0.0, 1.0],
        "exponents": { "power_q": [1.0] },
        "theorems": ["thm22", "hh13"],
        "seed": 3,
        "out": report_path.to_str().unwrap(),
    });
    std::fs::write(&config_path, serde_json::to_vec(&config).unwrap()).unwrap();
    let out = harmint(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(report_path.exists(), "config-supplied out path honored");
}

#[test]
fn malformed_sweep_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = harmint(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let out = harmint(&["sweep", "--config", "/nonexistent/config.json"]);
    assert_eq!(code(&out), 2);
}
