//! Table rendering and the machine-readable report envelope.

use std::path::Path;

use clap::ValueEnum;
use harmint::constants::CoefficientSet;
use harmint::means::PropositionReport;
use harmint::sweep::SweepReport;
use harmint::{BoundVerdict, MeanSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

pub fn print_verdicts(verdicts: &[BoundVerdict], format: Format) {
    match format {
        Format::Table => {
            println!(
                "{:<28} {:<12} {:>10} {:>10} {:>8} {:>8} {:>14} {:>14} {:>11}  status",
                "check", "function", "a", "b", "lambda", "q", "lhs", "rhs", "slack"
            );
            for v in verdicts {
                println!(
                    "{:<28} {:<12} {:>10} {:>10} {:>8} {:>8} {:>14.8e} {:>14.8e} {:>11.3e}  {}",
                    v.theorem_tag,
                    v.inputs.function.as_deref().unwrap_or("-"),
                    opt(v.inputs.a),
                    opt(v.inputs.b),
                    opt(v.inputs.lambda),
                    opt(v.inputs.q),
                    v.lhs,
                    v.rhs,
                    v.slack,
                    if v.passed { "PASS" } else { "FAIL" }
                );
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let _ = w.write_record([
                "check", "function", "a", "b", "lambda", "p", "q", "n", "lhs", "rhs", "slack",
                "status",
            ]);
            for v in verdicts {
                let _ = w.write_record([
                    v.theorem_tag.clone(),
                    v.inputs.function.clone().unwrap_or_default(),
                    v.inputs.a.map_or_else(String::new, |x| x.to_string()),
                    v.inputs.b.map_or_else(String::new, |x| x.to_string()),
                    v.inputs.lambda.map_or_else(String::new, |x| x.to_string()),
                    v.inputs.p.map_or_else(String::new, |x| x.to_string()),
                    v.inputs.q.map_or_else(String::new, |x| x.to_string()),
                    v.inputs.n.map_or_else(String::new, |x| x.to_string()),
                    v.lhs.to_string(),
                    v.rhs.to_string(),
                    v.slack.to_string(),
                    if v.passed { "PASS" } else { "FAIL" }.into(),
                ]);
            }
            let _ = w.flush();
        }
    }
}

pub fn print_coefficients(set: &CoefficientSet, format: Format) {
    match format {
        Format::Table => {
            println!("coefficients ({})", set.origin);
            for (name, value) in &set.values {
                println!("  {name:<10} = {value:.15e}");
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let _ = w.write_record(["name", "value"]);
            for (name, value) in &set.values {
                let _ = w.write_record([name.clone(), value.to_string()]);
            }
            let _ = w.flush();
        }
    }
}

pub fn print_means(set: &MeanSet, format: Format) {
    match format {
        Format::Table => {
            println!("special means");
            println!("  H  = {:.15e}", set.harmonic);
            println!("  G  = {:.15e}", set.geometric);
            println!("  L  = {:.15e}", set.logarithmic);
            println!("  I  = {:.15e}", set.identric);
            println!("  A  = {:.15e}", set.arithmetic);
            for (p, value) in &set.p_logarithmic {
                println!("  L_{p} = {value:.15e}");
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let _ = w.write_record(["name", "value"]);
            let _ = w.write_record(["H".into(), set.harmonic.to_string()]);
            let _ = w.write_record(["G".into(), set.geometric.to_string()]);
            let _ = w.write_record(["L".into(), set.logarithmic.to_string()]);
            let _ = w.write_record(["I".into(), set.identric.to_string()]);
            let _ = w.write_record(["A".into(), set.arithmetic.to_string()]);
            for (p, value) in &set.p_logarithmic {
                let _ = w.write_record([format!("L_{p}"), value.to_string()]);
            }
            let _ = w.flush();
        }
    }
}

pub fn print_proposition(report: &PropositionReport, format: Format) {
    print_verdicts(&[report.printed.clone(), report.theorem.clone()], format);
    if format == Format::Table {
        println!(
            "printed form vs theorem: lhs delta {:.3e}, rhs delta {:.3e} ({})",
            report.lhs_delta,
            report.rhs_delta,
            if report.printed_matches_theorem {
                "consistent"
            } else {
                "DISCREPANCY"
            }
        );
        if let Some(d) = &report.derivative_discrepancy {
            println!(
                "printed derivative surrogate differs from |f'|: at a {:.6} vs {:.6}, \
                 at b {:.6} vs {:.6}",
                d.surrogate_at_a, d.true_at_a, d.surrogate_at_b, d.true_at_b
            );
        }
    }
}

pub fn print_sweep(report: &SweepReport, format: Format) {
    match format {
        Format::Table => {
            println!(
                "{:<12} {:>8} {:>8} {:>8} {:>14}",
                "theorem", "pass", "fail", "unmet", "min slack"
            );
            for s in &report.summary {
                println!(
                    "{:<12} {:>8} {:>8} {:>8} {:>14}",
                    s.theorem,
                    s.pass,
                    s.fail,
                    s.unmet,
                    s.min_slack
                        .map_or_else(|| "-".into(), |m| format!("{m:.3e}"))
                );
            }
            println!("identity max residual: {:.3e}", report.identity_max_err);
            println!("coefficient oracle max error: {:.3e}", report.oracle_max_err);
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let _ = w.write_record(["theorem", "pass", "fail", "unmet", "min_slack"]);
            for s in &report.summary {
                let _ = w.write_record([
                    s.theorem.clone(),
                    s.pass.to_string(),
                    s.fail.to_string(),
                    s.unmet.to_string(),
                    s.min_slack.map_or_else(String::new, |m| m.to_string()),
                ]);
            }
            let _ = w.flush();
        }
    }
}

/// The `--out` envelope: flattened records plus a summary block.
#[derive(Serialize)]
pub struct MachineReport {
    pub records: Vec<Value>,
    pub summary: Value,
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report types serialize")
}

impl MachineReport {
    pub fn for_verdicts(verdicts: &[BoundVerdict]) -> Self {
        let passed = verdicts.iter().filter(|v| v.passed).count();
        Self {
            records: verdicts.iter().map(to_value).collect(),
            summary: json!({ "pass": passed, "fail": verdicts.len() - passed, "unmet": 0 }),
        }
    }

    pub fn for_unmet(reason: &str) -> Self {
        Self {
            records: vec![json!({ "status": "unmet", "detail": reason })],
            summary: json!({ "pass": 0, "fail": 0, "unmet": 1 }),
        }
    }

    pub fn for_coefficients(set: &CoefficientSet) -> Self {
        let records = set
            .values
            .iter()
            .map(|(name, value)| json!({ "name": name, "value": value, "origin": set.origin }))
            .collect();
        Self {
            records,
            summary: to_value(&set.args),
        }
    }

    pub fn for_means(set: &MeanSet, verdicts: &[BoundVerdict]) -> Self {
        let passed = verdicts.iter().filter(|v| v.passed).count();
        Self {
            records: verdicts.iter().map(to_value).collect(),
            summary: json!({
                "means": to_value(set),
                "pass": passed,
                "fail": verdicts.len() - passed,
            }),
        }
    }

    pub fn for_proposition(report: &PropositionReport) -> Self {
        Self {
            records: vec![to_value(&report.printed), to_value(&report.theorem)],
            summary: json!({
                "id": report.id,
                "lhs_delta": report.lhs_delta,
                "rhs_delta": report.rhs_delta,
                "printed_matches_theorem": report.printed_matches_theorem,
                "derivative_discrepancy": to_value(&report.derivative_discrepancy),
            }),
        }
    }

    pub fn for_sweep(report: &SweepReport) -> Self {
        Self {
            records: report.verdicts.iter().map(to_value).collect(),
            summary: json!({
                "seed": report.seed,
                "theorems": to_value(&report.summary),
                "identity_max_err": report.identity_max_err,
                "oracle_max_err": report.oracle_max_err,
            }),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        std::fs::write(path, bytes)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }
}
