//! Report envelope written by every subcommand.
//!
//! The envelope separates the deterministic payload from timing: re-running a
//! command with the same arguments reproduces `results` byte for byte, while
//! `wall_time_seconds` lives outside it and is free to vary. Optional numeric
//! fields are omitted entirely rather than serialized as non-finite values,
//! so every number that does appear in a report is finite.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use renyicone::solver::{SolveResult, SolveStatus};

use crate::{CliError, CliResult};

/// Top-level report. `results` is the command-specific payload.
#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub schema: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub config: Value,
    pub library_version: String,
    pub results: Value,
    pub wall_time_seconds: f64,
}

/// Reject payloads containing nulls. serde_json serializes non-finite floats
/// as `null` and nothing else in a report legitimately produces one, so this
/// is exactly the "every numeric field is finite" guarantee.
pub fn reject_nulls(v: &Value) -> CliResult<()> {
    match v {
        Value::Null => Err(CliError::invalid(
            "report contains a non-finite numeric field",
        )),
        Value::Array(items) => items.iter().try_for_each(reject_nulls),
        Value::Object(map) => map.values().try_for_each(reject_nulls),
        _ => Ok(()),
    }
}

impl ReportFile {
    pub fn new(command: &str, seed: Option<u64>, config: Value, results: Value) -> Self {
        ReportFile {
            schema: crate::problem::SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            config,
            library_version: renyicone::VERSION.to_string(),
            results,
            wall_time_seconds: 0.0,
        }
    }

    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }

    /// Write to `output`, or stdout when no path is given.
    pub fn emit(&self, output: Option<&Path>) -> CliResult<()> {
        reject_nulls(&self.results)?;
        let text = self.render();
        match output {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
        }
    }
}

/// KKT residuals with non-finite entries dropped.
#[derive(Debug, Serialize)]
pub struct ResidualsPayload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct TraceRow {
    pub mu: f64,
    pub newton_decrement: f64,
    pub step_size: f64,
    pub objective: f64,
}

/// Serializable view of a [`SolveResult`].
#[derive(Debug, Serialize)]
pub struct SolvePayload {
    pub status: String,
    pub objective_value: f64,
    pub objective_estimate: f64,
    pub gap_bound: f64,
    pub mu: f64,
    pub iterations: usize,
    pub residuals: ResidualsPayload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<f64>,
    pub trace: Vec<TraceRow>,
}

pub fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::IterationLimit => "iteration-limit",
        SolveStatus::NumericalFailure => "numerical-failure",
        SolveStatus::Infeasible => "infeasible",
    }
}

/// Process exit code mandated for `solve`-style outcomes.
pub fn status_exit_code(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::IterationLimit => 2,
        SolveStatus::NumericalFailure => 3,
        SolveStatus::Infeasible => 5,
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl SolvePayload {
    pub fn from_result(result: &SolveResult) -> Self {
        SolvePayload {
            status: status_name(result.status).to_string(),
            objective_value: result.objective_value,
            objective_estimate: result.objective_estimate,
            gap_bound: result.gap_bound,
            mu: result.mu,
            iterations: result.iterations,
            residuals: ResidualsPayload {
                primal: finite(result.kkt.primal),
                dual: finite(result.kkt.dual),
                gap: finite(result.kkt.gap),
            },
            infeasibility: result.infeasibility.and_then(finite),
            trace: result
                .trace
                .iter()
                .map(|r| TraceRow {
                    mu: r.mu,
                    newton_decrement: r.newton_decrement,
                    step_size: r.step_size,
                    objective: r.objective,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_stably_and_skips_missing_fields() {
        let report = ReportFile::new(
            "solve",
            None,
            json!({"tol": 1e-8}),
            json!({"status": "optimal"}),
        );
        let a = report.render();
        let b = report.render();
        assert_eq!(a, b);
        assert!(!a.contains("\"seed\""));
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn null_payloads_are_rejected() {
        assert!(reject_nulls(&json!({"a": [1.0, {"b": 2.0}]})).is_ok());
        assert!(reject_nulls(&json!({"a": [1.0, null]})).is_err());
        // A non-finite float turns into null under serde_json and is caught.
        let sneaky = serde_json::to_value(f64::NAN).unwrap();
        assert!(reject_nulls(&json!({ "v": sneaky })).is_err());
    }

    #[test]
    fn non_finite_residuals_are_omitted_not_null() {
        let payload = ResidualsPayload {
            primal: Some(1e-12),
            dual: None,
            gap: Some(0.0),
        };
        let text = serde_json::to_string(&payload).unwrap();
        assert!(text.contains("primal"));
        assert!(!text.contains("dual"));
        assert!(!text.contains("null"));
    }
}
