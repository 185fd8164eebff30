//! Problem data: `min c.x` subject to `max_j T(a_ij, x_j) = b_i`, `x` in `[0,1]^n`.

use crate::error::{FreError, Result};
use crate::tnorm::TNormParam;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Deref, DerefMut};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    param: TNormParam,
    tol: f64,
}

impl Instance {
    /// Validates shape and ranges. Locations in errors are 1-based.
    pub fn new(
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
        param: TNormParam,
        tol: f64,
    ) -> Result<Self> {
        let m = a.len();
        if m == 0 {
            return Err(FreError::validation(
                "A",
                "matrix must have at least one row",
            ));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(FreError::validation(
                "A",
                "matrix must have at least one column",
            ));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(FreError::validation(
                    format!("A row {}", i + 1),
                    format!("expected {n} columns, found {}", row.len()),
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(FreError::validation(
                        format!("A[{}][{}]", i + 1, j + 1),
                        format!("{v} is outside [0, 1]"),
                    ));
                }
            }
        }
        if b.len() != m {
            return Err(FreError::validation(
                "b",
                format!("expected {m} entries, found {}", b.len()),
            ));
        }
        for (i, &v) in b.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(FreError::validation(
                    format!("b[{}]", i + 1),
                    format!("{v} is outside [0, 1]"),
                ));
            }
        }
        if c.len() != n {
            return Err(FreError::validation(
                "c",
                format!("expected {n} entries, found {}", c.len()),
            ));
        }
        if let Some(j) = c.iter().position(|v| !v.is_finite()) {
            return Err(FreError::validation(
                format!("c[{}]", j + 1),
                "cost must be finite",
            ));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(FreError::validation(
                "tol",
                format!("{tol} must be positive"),
            ));
        }
        Ok(Instance {
            a,
            b,
            c,
            param,
            tol,
        })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.a[i]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn param(&self) -> TNormParam {
        self.param
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_param(mut self, param: TNormParam) -> Self {
        self.param = param;
        self
    }

    pub fn with_tol(self, tol: f64) -> Result<Self> {
        Instance::new(self.a, self.b, self.c, self.param, tol)
    }

    pub fn with_b(self, b: Vec<f64>) -> Result<Self> {
        Instance::new(self.a, b, self.c, self.param, self.tol)
    }

    pub fn with_c(self, c: Vec<f64>) -> Result<Self> {
        Instance::new(self.a, self.b, c, self.param, self.tol)
    }

    /// `c . x` in full precision.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }
}

/// A vector in `[0,1]^n`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Point(vec![1.0; n])
    }

    /// `self <= other + tol` in every component.
    pub fn le_within(&self, other: &[f64], tol: f64) -> bool {
        self.len() == other.len() && self.iter().zip(other).all(|(x, y)| *x <= *y + tol)
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.iter()
            .zip(other)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl fmt::Display for Point {
    /// Four decimals, matching the usual tabulated presentation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_4(*v))?;
        }
        write!(f, "]")
    }
}

/// Formats with four decimals and drops trailing zeros, so 1.0 prints as `1`.
pub(crate) fn fmt_4(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// One column per equation, `e[i]` in `J[i]`. Columns are 0-based internally
/// and 1-based in every rendered or serialized form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Selection(pub Vec<usize>);

impl Selection {
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }

    pub fn from_one_based(cols: &[usize]) -> Result<Self> {
        cols.iter()
            .enumerate()
            .map(|(i, &j)| {
                j.checked_sub(1).ok_or_else(|| {
                    FreError::validation(format!("e[{}]", i + 1), "columns are 1-based")
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Selection)
    }
}

impl Deref for Selection {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self.one_based().iter().map(|j| j.to_string()).collect();
        write!(f, "[{}]", cols.join(", "))
    }
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Selection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cols = Vec::<usize>::deserialize(d)?;
        Selection::from_one_based(&cols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> TNormParam {
        TNormParam::new(2.0).unwrap()
    }

    #[test]
    fn rejects_ragged_matrix() {
        let err = Instance::new(
            vec![vec![0.1, 0.2], vec![0.3]],
            vec![0.1, 0.1],
            vec![1.0, 1.0],
            p(),
            DEFAULT_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, FreError::Validation { ref location, .. } if location == "A row 2"));
    }

    #[test]
    fn rejects_out_of_range_entry_with_location() {
        let err = Instance::new(
            vec![vec![0.1, 1.5]],
            vec![0.1],
            vec![1.0, 1.0],
            p(),
            DEFAULT_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, FreError::Validation { ref location, .. } if location == "A[1][2]"));
    }

    #[test]
    fn rejects_bad_tol_and_lengths() {
        let a = vec![vec![0.5]];
        assert!(Instance::new(a.clone(), vec![0.1], vec![1.0], p(), 0.0).is_err());
        assert!(Instance::new(a.clone(), vec![0.1, 0.2], vec![1.0], p(), 1e-9).is_err());
        assert!(Instance::new(a, vec![0.1], vec![], p(), 1e-9).is_err());
    }

    #[test]
    fn point_formatting() {
        let x = Point(vec![1.0, 0.0, 0.64131, -0.0, 0.5]);
        assert_eq!(x.to_string(), "[1, 0, 0.6413, 0, 0.5]");
    }

    #[test]
    fn selection_is_one_based_outside() {
        let e = Selection(vec![0, 0, 6]);
        assert_eq!(e.to_string(), "[1, 1, 7]");
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, "[1,1,7]");
        let back: Selection = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<Selection>("[0]").is_err());
    }
}
