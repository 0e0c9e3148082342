//! Check reports, their JSON/text rendering and the schema validator.

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt::Write as _;

/// Outcome of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Result of one named check. `residual` is relative to `scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub scale: f64,
    pub samples: usize,
    pub seconds: f64,
    pub diagnostics: Value,
}

/// A complete run: the scenario and one report per requested check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: ScenarioConfig,
    pub checks: Vec<CheckReport>,
}

impl Report {
    /// True iff no check failed (skipped checks count as passing).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Process exit code of the run: 0 if every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Exit code for an error that aborted a run: 3 for numeric errors
/// (truncation, pole guard, τ floor, rank deficiency), 2 for everything else.
pub fn error_exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

/// Output format of [`emit_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown report format {other:?} (expected json or text)"))),
        }
    }
}

/// Renders a report. JSON is pretty-printed with a trailing newline; text
/// has one line per check followed by an overall verdict.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let sc = &report.scenario;
            let mut s = String::new();
            let _ = writeln!(
                s,
                "scenario {} level {} mode {} tau {}{:+}i seed {} samples {}",
                sc.type_name, sc.level_k, sc.mode, sc.tau.re, sc.tau.im, sc.seed, sc.sample_points
            );
            for c in &report.checks {
                let _ = write!(s, "{:<8} {:<28}", c.status.as_str().to_uppercase(), c.name);
                if c.status == Status::Skipped {
                    let why = c.diagnostics.get("reason").and_then(Value::as_str).unwrap_or("");
                    let _ = writeln!(s, " {why}");
                } else {
                    let tol = sc.tolerances.get(&c.name).copied().unwrap_or(f64::NAN);
                    let _ = writeln!(
                        s,
                        " residual {:.3e} (tol {:.1e}, scale {:.3e}, {} samples, {:.2}s)",
                        c.residual, tol, c.scale, c.samples, c.seconds
                    );
                }
            }
            let failed = report.checks.iter().filter(|c| c.status == Status::Fail).count();
            let _ = writeln!(s, "{} checks, {} failed", report.checks.len(), failed);
            s
        }
    }
}

/// Validates a JSON value against the report schema:
/// `{scenario: {...}, checks: [{name, status, residual, scale, samples, seconds, diagnostics}]}`.
pub fn validate_report(v: &Value) -> Result<()> {
    let err = |m: String| Err(Error::Config(format!("report schema: {m}")));
    let Some(obj) = v.as_object() else { return err("top level is not an object".into()) };
    for key in obj.keys() {
        if key != "scenario" && key != "checks" {
            return err(format!("unexpected key {key:?}"));
        }
    }
    let Some(scenario) = obj.get("scenario") else { return err("missing scenario".into()) };
    if let Err(e) = ScenarioConfig::deserialize(scenario) {
        return err(format!("scenario: {e}"));
    }
    let Some(checks) = obj.get("checks").and_then(Value::as_array) else { return err("checks is not an array".into()) };
    for (i, c) in checks.iter().enumerate() {
        let Some(c) = c.as_object() else { return err(format!("checks[{i}] is not an object")) };
        let fields = ["name", "status", "residual", "scale", "samples", "seconds", "diagnostics"];
        for f in fields {
            if !c.contains_key(f) {
                return err(format!("checks[{i}] lacks {f:?}"));
            }
        }
        if c.len() != fields.len() {
            return err(format!("checks[{i}] has unexpected fields"));
        }
        if !c["name"].is_string() {
            return err(format!("checks[{i}].name is not a string"));
        }
        if !matches!(c["status"].as_str(), Some("pass" | "fail" | "skipped")) {
            return err(format!("checks[{i}].status is not pass, fail or skipped"));
        }
        for f in ["residual", "scale", "seconds"] {
            match c[f].as_f64() {
                Some(x) if x >= 0.0 => {}
                _ => return err(format!("checks[{i}].{f} is not a non-negative number")),
            }
        }
        if c["samples"].as_u64().is_none() {
            return err(format!("checks[{i}].samples is not a non-negative integer"));
        }
        if !c["diagnostics"].is_object() {
            return err(format!("checks[{i}].diagnostics is not an object"));
        }
    }
    Ok(())
}
