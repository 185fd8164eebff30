//! Regression corpus runner.
//!
//! Each case is a pair of files in the corpus directory:
//! `<name>.instance.json`, an ordinary instance document, and
//! `<name>.expected.json`, holding the expected outputs, a tolerance per
//! numeric field and a provenance note for every expected value. A case
//! whose expectation lacks a note fails.

use crate::error::{FreError, Result};
use crate::instance::Selection;
use crate::io::InstanceDocument;
use crate::optimizer::{solve, SolveOptions};
use crate::resolution::index_sets;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub feasible: bool,
    #[serde(default)]
    pub index_sets: Option<Vec<Vec<usize>>>,
    #[serde(default, rename = "Xbar")]
    pub xbar: Option<Vec<f64>>,
    #[serde(default)]
    pub unreduced_count: Option<u128>,
    #[serde(default)]
    pub e_star: Option<Selection>,
    #[serde(default, rename = "X_e_star")]
    pub x_e_star: Option<Vec<f64>>,
    #[serde(default)]
    pub x_star: Option<Vec<f64>>,
    #[serde(default)]
    pub z_star: Option<f64>,
}

impl Expected {
    fn present_fields(&self) -> Vec<&'static str> {
        let mut f = vec!["feasible"];
        if self.index_sets.is_some() {
            f.push("index_sets");
        }
        if self.xbar.is_some() {
            f.push("Xbar");
        }
        if self.unreduced_count.is_some() {
            f.push("unreduced_count");
        }
        if self.e_star.is_some() {
            f.push("e_star");
        }
        if self.x_e_star.is_some() {
            f.push("X_e_star");
        }
        if self.x_star.is_some() {
            f.push("x_star");
        }
        if self.z_star.is_some() {
            f.push("z_star");
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub name: String,
    pub expected: Expected,
    /// Absolute tolerance per numeric field; missing fields default to 1e-4.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub provenance: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCase {
    pub instance: InstanceDocument,
    pub expectation: Expectation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenOutcome {
    pub name: String,
    pub failures: Vec<String>,
}

impl GoldenOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn compare_vec(field: &str, got: &[f64], want: &[f64], tol: f64, failures: &mut Vec<String>) {
    if got.len() != want.len() {
        failures.push(format!("{field}: length {} != {}", got.len(), want.len()));
        return;
    }
    for (k, (g, w)) in got.iter().zip(want).enumerate() {
        if (g - w).abs() > tol {
            failures.push(format!("{field}[{}]: {g} vs {w} (tol {tol})", k + 1));
        }
    }
}

pub fn run_case(case: &GoldenCase) -> GoldenOutcome {
    let (doc, case) = (&case.instance, &case.expectation);
    let mut failures = Vec::new();
    for field in case.expected.present_fields() {
        if !case.provenance.contains_key(field) {
            failures.push(format!("{field}: no provenance note"));
        }
    }
    let tol = |f: &str| case.tolerances.get(f).copied().unwrap_or(1e-4);
    let inst = match doc.clone().into_instance() {
        Ok(i) => i,
        Err(e) => {
            failures.push(format!("instance: {e}"));
            return GoldenOutcome {
                name: case.name.clone(),
                failures,
            };
        }
    };
    let exp = &case.expected;
    if let Some(want) = &exp.index_sets {
        let got = index_sets(&inst).one_based();
        if &got != want {
            failures.push(format!("index_sets: {got:?} vs {want:?}"));
        }
    }
    let report = match solve(&inst, SolveOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            failures.push(format!("solve: {e}"));
            return GoldenOutcome {
                name: case.name.clone(),
                failures,
            };
        }
    };
    if report.feasible != exp.feasible {
        failures.push(format!("feasible: {} vs {}", report.feasible, exp.feasible));
    }
    if let Some(want) = &exp.xbar {
        compare_vec("Xbar", &report.xbar, want, tol("Xbar"), &mut failures);
    }
    if let Some(want) = exp.unreduced_count {
        if report.unreduced_count != want {
            failures.push(format!(
                "unreduced_count: {} vs {want}",
                report.unreduced_count
            ));
        }
    }
    if let Some(want) = &exp.e_star {
        if report.e_star.as_ref() != Some(want) {
            failures.push(format!(
                "e_star: {:?} vs {want}",
                report.e_star.as_ref().map(|e| e.to_string())
            ));
        }
    }
    let missing = |f: &str, failures: &mut Vec<String>| failures.push(format!("{f}: not produced"));
    if let Some(want) = &exp.x_e_star {
        match &report.x_e_star {
            Some(got) => compare_vec("X_e_star", got, want, tol("X_e_star"), &mut failures),
            None => missing("X_e_star", &mut failures),
        }
    }
    if let Some(want) = &exp.x_star {
        match &report.x_star {
            Some(got) => compare_vec("x_star", got, want, tol("x_star"), &mut failures),
            None => missing("x_star", &mut failures),
        }
    }
    if let Some(want) = exp.z_star {
        match report.z_star {
            Some(got) if (got - want).abs() <= tol("z_star") => {}
            Some(got) => failures.push(format!("z_star: {got} vs {want} (tol {})", tol("z_star"))),
            None => missing("z_star", &mut failures),
        }
    }
    GoldenOutcome {
        name: case.name.clone(),
        failures,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| FreError::parse(path.display().to_string(), e.to_string()))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        FreError::parse(
            format!("{} line {} column {}", path.display(), e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// Loads `<name>.expected.json` and `<name>.instance.json` from `dir`.
pub fn load_case(dir: &Path, name: &str) -> Result<GoldenCase> {
    let exp_path = dir.join(format!("{name}.expected.json"));
    let inst_path = dir.join(format!("{name}.instance.json"));
    Ok(GoldenCase {
        expectation: from_json(&exp_path, &read(&exp_path)?)?,
        instance: from_json(&inst_path, &read(&inst_path)?)?,
    })
}

/// Case names in `dir`, sorted.
pub fn case_names(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| FreError::parse(dir.display().to_string(), e.to_string()))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            e.file_name()
                .to_str()
                .and_then(|f| f.strip_suffix(".expected.json"))
                .map(str::to_string)
        })
        .collect();
    names.sort();
    Ok(names)
}

/// Runs every case in `dir`, in name order.
pub fn run_goldens(dir: &Path) -> Result<Vec<GoldenOutcome>> {
    case_names(dir)?
        .iter()
        .map(|name| load_case(dir, name).map(|c| run_case(&c)))
        .collect()
}
