//! Instance documents and report rendering.
//!
//! Instances and machine-readable reports share one JSON format. Floats are
//! written with shortest round-trip formatting and parsed back exactly.

use crate::error::{FreError, Result};
use crate::instance::{fmt_4, Instance, DEFAULT_TOL};
use crate::optimizer::OptimizationReport;
use crate::resolution::ResolutionReport;
use crate::tnorm::TNormParam;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl InstanceDocument {
    pub fn into_instance(self) -> Result<Instance> {
        let param = TNormParam::new(self.lambda).map_err(|_| {
            FreError::validation("lambda", format!("{} must be positive", self.lambda))
        })?;
        Instance::new(
            self.a,
            self.b,
            self.c,
            param,
            self.tol.unwrap_or(DEFAULT_TOL),
        )
    }
}

impl From<&Instance> for InstanceDocument {
    fn from(inst: &Instance) -> Self {
        InstanceDocument {
            comment: None,
            lambda: inst.param().lambda(),
            a: inst.a().to_vec(),
            b: inst.b().to_vec(),
            c: inst.c().to_vec(),
            tol: Some(inst.tol()),
        }
    }
}

fn json_error(e: serde_json::Error) -> FreError {
    FreError::parse(
        format!("line {} column {}", e.line(), e.column()),
        e.to_string(),
    )
}

pub fn parse_document(text: &str) -> Result<InstanceDocument> {
    serde_json::from_str(text).map_err(json_error)
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    parse_document(text)?.into_instance()
}

pub fn instance_to_document(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDocument::from(inst)).expect("finite floats serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Clone, Copy)]
pub enum ReportRef<'a> {
    Optimization(&'a OptimizationReport),
    Resolution(&'a ResolutionReport),
}

pub fn emit_report(report: ReportRef<'_>, mode: Mode) -> String {
    match (report, mode) {
        (ReportRef::Optimization(r), Mode::Machine) => {
            serde_json::to_string_pretty(r).expect("finite floats serialize")
        }
        (ReportRef::Resolution(r), Mode::Machine) => {
            serde_json::to_string_pretty(r).expect("finite floats serialize")
        }
        (ReportRef::Optimization(r), Mode::Text) => optimization_text(r),
        (ReportRef::Resolution(r), Mode::Text) => resolution_text(r),
    }
}

pub fn parse_optimization_report(text: &str) -> Result<OptimizationReport> {
    serde_json::from_str(text).map_err(json_error)
}

pub fn parse_resolution_report(text: &str) -> Result<ResolutionReport> {
    serde_json::from_str(text).map_err(json_error)
}

fn verdict(feasible: bool, empty: &[usize]) -> String {
    if feasible {
        "feasible".to_string()
    } else if empty.is_empty() {
        "infeasible (Xbar does not solve the system)".to_string()
    } else {
        let eqs: Vec<String> = empty.iter().map(|i| i.to_string()).collect();
        format!("infeasible (empty J for equation {})", eqs.join(", "))
    }
}

fn optimization_text(r: &OptimizationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", verdict(r.feasible, &r.empty_equations));
    let _ = writeln!(s, "Xbar = {}", r.xbar);
    let _ = writeln!(s, "|E| = {}", r.unreduced_count);
    if !r.feasible {
        return s;
    }
    let _ = writeln!(
        s,
        "candidates examined = {}, pruned = {}{}",
        r.candidates_examined,
        r.candidates_pruned,
        if r.pruned_search {
            " (branch and bound)"
        } else {
            ""
        }
    );
    if let (Some(e), Some(xe), Some(z1)) = (&r.e_star, &r.x_e_star, r.z1_value) {
        let _ = writeln!(s, "e* = {e}");
        let _ = writeln!(s, "X(e*) = {xe}");
        let _ = writeln!(s, "Z1 = {}", fmt_4(z1));
    }
    if let (Some(x), Some(z)) = (&r.x_star, r.z_star) {
        let _ = writeln!(s, "x* = {x}");
        let _ = writeln!(s, "Z* = {z:.4}");
    }
    for (k, o) in r.optima.iter().enumerate() {
        let _ = writeln!(s, "optimum {}: e = {}, x = {}", k + 1, o.e, o.x);
    }
    s
}

fn resolution_text(r: &ResolutionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", verdict(r.feasible, &r.empty_equations));
    let _ = writeln!(s, "Xbar = {}", r.xbar);
    let _ = writeln!(s, "|E| = {}", r.unreduced_count);
    if !r.feasible {
        return s;
    }
    let _ = writeln!(
        s,
        "distinct candidates below Xbar = {}, pruned = {}",
        r.candidate_count, r.pruned_count
    );
    let label = if r.minimal_only {
        "minimal solutions"
    } else {
        "candidates"
    };
    let _ = writeln!(s, "{label} ({}):", r.kept.len());
    for k in &r.kept {
        let _ = writeln!(s, "  e = {}  X(e) = {}", k.selection, k.point);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_b_is_parse_error() {
        let err = parse_instance(r#"{"lambda": 2, "A": [[0.5]], "c": [1]}"#).unwrap_err();
        match err {
            FreError::Parse { message, .. } => assert!(message.contains("`b`")),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn out_of_range_entry_is_validation_error() {
        let err = parse_instance(r#"{"lambda": 2, "A": [[0.5, 1.5]], "b": [0.3], "c": [1, 1]}"#)
            .unwrap_err();
        assert_eq!(
            err,
            FreError::Validation {
                location: "A[1][2]".into(),
                message: "1.5 is outside [0, 1]".into()
            }
        );
    }

    #[test]
    fn bad_lambda_and_unknown_key() {
        assert!(matches!(
            parse_instance(r#"{"lambda": 0, "A": [[0.5]], "b": [0.3], "c": [1]}"#),
            Err(FreError::Validation { .. })
        ));
        assert!(matches!(
            parse_instance(r#"{"lambda": 1, "A": [[0.5]], "b": [0.3], "c": [1], "x": 2}"#),
            Err(FreError::Parse { .. })
        ));
        assert!(matches!(parse_instance("{"), Err(FreError::Parse { .. })));
    }

    #[test]
    fn tol_defaults() {
        let inst = parse_instance(r#"{"lambda": 2, "A": [[0.5]], "b": [0.3], "c": [1]}"#).unwrap();
        assert_eq!(inst.tol(), DEFAULT_TOL);
    }

    #[test]
    fn instance_document_round_trip() {
        let text = r#"{"lambda": 2.5, "A": [[0.1234567890123, 0.3]], "b": [0.1], "c": [-1e-7, 3], "tol": 1e-8}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(parse_instance(&instance_to_document(&inst)).unwrap(), inst);
    }
}
