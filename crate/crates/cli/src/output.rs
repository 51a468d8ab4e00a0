//! Report envelope and human rendering helpers. Human text and JSON are
//! produced from the same report objects; with a fixed seed the JSON bytes
//! are identical across runs.

use serde::Serialize;

use shiftfix_core::conditions::{ConditionReport, Verdict};
use shiftfix_core::{ChecksSpec, SolverSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Wrapper adding the schema version, the command name and the resolved
/// parameters to every JSON document.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub checks: ChecksSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
    #[serde(flatten)]
    pub report: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(
        command: &'static str,
        checks: &ChecksSpec,
        solver: Option<&SolverSpec>,
        report: T,
    ) -> Envelope<T> {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            checks: checks.clone(),
            solver: solver.cloned(),
            report,
        }
    }

    pub fn print_json(&self) {
        println!(
            "{}",
            serde_json::to_string_pretty(self).expect("reports serialize")
        );
    }
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn describe_condition(name: &str, report: &ConditionReport) -> String {
    let margin = report
        .margin
        .map(|m| format!("{m:.3e}"))
        .unwrap_or_else(|| "n/a (hypothesis never fired)".into());
    let mut line = format!(
        "condition {name}: {} ({} flagged over {} samples, worst margin {margin})",
        verdict_word(report.verdict),
        report.violations,
        report.samples_used,
    );
    if let Some(w) = report.witnesses.first() {
        line.push_str(&format!(
            "\n  worst witness [{}] at {:?} with values {:?}",
            w.label, w.inputs, w.values
        ));
    }
    line
}
