//! Resolution of the feasible set `S(A, b)`.
//!
//! The feasible set is the union of boxes `[X(e), Xbar]` over selections `e`,
//! where `Xbar` is the componentwise minimum of the per-equation maximum
//! solutions and `X(e)` takes, in each column, the largest residual
//! requested by an equation that selected it.

use crate::error::{FreError, Result};
use crate::instance::{Instance, Point, Selection};
use crate::tnorm::{max_compose, tnorm_residual};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// `J[i] = { j : a_ij >= b_i }`, 0-based columns, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets(Vec<Vec<usize>>);

impl IndexSets {
    pub fn get(&self, i: usize) -> &[usize] {
        &self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.0.iter().map(Vec::as_slice)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.0[i].binary_search(&j).is_ok()
    }

    /// Equations whose index set is empty.
    pub fn empty_equations(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    /// `prod |J[i]|`, saturating at `u128::MAX`.
    pub fn product_size(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.0
            .iter()
            .map(|s| s.iter().map(|j| j + 1).collect())
            .collect()
    }
}

/// Exact comparison; no tolerance.
pub fn index_sets(inst: &Instance) -> IndexSets {
    IndexSets(
        (0..inst.m())
            .map(|i| {
                let bi = inst.b()[i];
                inst.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a >= bi)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect(),
    )
}

/// The value equation `i` forces on column `j` when it selects it, for
/// `j` in `J[i]`: the residual if `b_i > 0`, else 0.
fn selected_value(inst: &Instance, i: usize, j: usize) -> f64 {
    let (a, b) = (inst.row(i)[j], inst.b()[i]);
    if b == 0.0 {
        0.0
    } else {
        tnorm_residual(a, b, inst.param()).expect("a_ij >= b_i > 0 for j in J[i]")
    }
}

/// Maximum solution of equation `i` alone.
///
/// Columns outside `J[i]` cannot reach `b_i` and are unconstrained, so they
/// sit at 1.
pub fn local_max(inst: &Instance, i: usize) -> Point {
    let bi = inst.b()[i];
    inst.row(i)
        .iter()
        .map(|&a| {
            if a < bi {
                1.0
            } else if bi > 0.0 {
                tnorm_residual(a, bi, inst.param()).expect("a >= b > 0")
            } else if a > 0.0 {
                0.0
            } else {
                1.0
            }
        })
        .collect::<Vec<_>>()
        .into()
}

/// `Xbar`, the componentwise minimum of all `local_max` vectors.
pub fn global_max(inst: &Instance) -> Point {
    let mut xbar = Point::ones(inst.n());
    for i in 0..inst.m() {
        for (x, v) in xbar.iter_mut().zip(local_max(inst, i).iter()) {
            *x = x.min(*v);
        }
    }
    xbar
}

/// Direct check of every equation within `inst.tol()`.
pub fn membership(inst: &Instance, x: &[f64]) -> Result<bool> {
    if x.len() != inst.n() {
        return Err(FreError::Dimension {
            expected: inst.n(),
            got: x.len(),
        });
    }
    for (row, &bi) in inst.a().iter().zip(inst.b()) {
        if (max_compose(row, x, inst.param())? - bi).abs() > inst.tol() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub xbar: Point,
    /// Equations with `b_i > 0` and an empty index set. When non-empty the
    /// verdict was reached without evaluating membership.
    pub empty_equations: Vec<usize>,
}

impl Feasibility {
    pub fn short_circuited(&self) -> bool {
        !self.empty_equations.is_empty()
    }
}

/// The system is solvable iff `Xbar` solves it.
pub fn feasibility(inst: &Instance) -> Feasibility {
    let xbar = global_max(inst);
    let empty_equations = index_sets(inst).empty_equations();
    let feasible =
        empty_equations.is_empty() && membership(inst, &xbar).expect("Xbar has length n");
    Feasibility {
        feasible,
        xbar,
        empty_equations,
    }
}

/// `x_i(j)`: the smallest point satisfying equation `i` through column `j`.
pub fn local_min_candidate(inst: &Instance, i: usize, j: usize) -> Result<Point> {
    if j >= inst.n() || inst.row(i)[j] < inst.b()[i] {
        return Err(FreError::Selection {
            equation: i,
            column: j,
        });
    }
    let mut x = Point::zeros(inst.n());
    x[j] = selected_value(inst, i, j);
    Ok(x)
}

/// `X(e)`, the componentwise maximum of `local_min_candidate(i, e[i])`.
pub fn candidate(inst: &Instance, e: &Selection) -> Result<Point> {
    if e.len() != inst.m() {
        return Err(FreError::Dimension {
            expected: inst.m(),
            got: e.len(),
        });
    }
    let mut x = Point::zeros(inst.n());
    for (i, &j) in e.iter().enumerate() {
        let xi = local_min_candidate(inst, i, j)?;
        x[j] = x[j].max(xi[j]);
    }
    Ok(x)
}

/// Per-equation choices after the cheap reductions: an equation with
/// `b_i = 0` contributes the zero vector whatever it selects, so it keeps
/// only its first column; within an equation, choices are unique by
/// `(column, value)`.
#[derive(Debug, Clone)]
pub(crate) struct Choices {
    pub(crate) per_equation: Vec<Vec<(usize, f64)>>,
}

impl Choices {
    pub(crate) fn build(inst: &Instance, sets: &IndexSets) -> Result<Self> {
        let mut per_equation = Vec::with_capacity(inst.m());
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(FreError::EmptySelection { equation: i });
            }
            let mut opts: Vec<(usize, f64)> = if inst.b()[i] == 0.0 {
                vec![(set[0], 0.0)]
            } else {
                set.iter()
                    .map(|&j| (j, selected_value(inst, i, j)))
                    .collect()
            };
            opts.dedup_by(|x, y| x.0 == y.0 && x.1.to_bits() == y.1.to_bits());
            per_equation.push(opts);
        }
        Ok(Choices { per_equation })
    }

    pub(crate) fn product_size(&self) -> u128 {
        self.per_equation
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }
}

/// Lexicographic stream over the reduced selection product.
#[derive(Debug, Clone)]
pub struct SelectionStream {
    choices: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
    unreduced: u128,
    reduced: u128,
}

impl SelectionStream {
    /// `prod |J[i]|` over the original index sets.
    pub fn unreduced_count(&self) -> u128 {
        self.unreduced
    }

    /// Number of selections this stream yields in total.
    pub fn reduced_count(&self) -> u128 {
        self.reduced
    }

    /// Stream over every selection, with no reduction at all.
    pub fn unreduced(sets: &IndexSets) -> Result<Self> {
        if let Some(i) = sets.empty_equations().first() {
            return Err(FreError::EmptySelection { equation: *i });
        }
        let choices: Vec<Vec<usize>> = sets.iter().map(<[usize]>::to_vec).collect();
        let n = sets.product_size();
        Ok(SelectionStream {
            cursor: Some(vec![0; choices.len()]),
            choices,
            unreduced: n,
            reduced: n,
        })
    }
}

impl Iterator for SelectionStream {
    type Item = Selection;

    fn next(&mut self) -> Option<Selection> {
        let cursor = self.cursor.as_mut()?;
        let out = Selection(
            cursor
                .iter()
                .zip(&self.choices)
                .map(|(&k, c)| c[k])
                .collect(),
        );
        // odometer step, last equation fastest
        let mut i = cursor.len();
        loop {
            if i == 0 {
                self.cursor = None;
                break;
            }
            i -= 1;
            cursor[i] += 1;
            if cursor[i] < self.choices[i].len() {
                break;
            }
            cursor[i] = 0;
        }
        Some(out)
    }
}

/// Lexicographic stream of selections with the `b_i = 0` and
/// duplicate-choice reductions applied.
pub fn enumerate_selections(inst: &Instance) -> Result<SelectionStream> {
    let sets = index_sets(inst);
    let choices = Choices::build(inst, &sets)?;
    Ok(SelectionStream {
        cursor: Some(vec![0; choices.per_equation.len()]),
        reduced: choices.product_size(),
        unreduced: sets.product_size(),
        choices: choices
            .per_equation
            .into_iter()
            .map(|c| c.into_iter().map(|(j, _)| j).collect())
            .collect(),
    })
}

/// Distinct candidate points, each with the lexicographically smallest
/// selection that produces it.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    pub unreduced: u128,
    /// Partial or full candidates dropped because they exceeded the bound.
    pub pruned: u64,
    pub candidates: Vec<(Selection, Point)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationLimits<'a> {
    /// Drop any partial candidate not below `bound + tol`; componentwise
    /// maxima only grow, so such a prefix never becomes feasible.
    pub bound: Option<(&'a [f64], f64)>,
    /// Abort when a frontier would hold more than this many points.
    pub max_candidates: Option<u64>,
}

fn point_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

/// Builds the candidate set equation by equation, merging prefixes that
/// reach the same partial point.
///
/// Two prefixes with the same partial point have identical completions, so
/// only the first (lexicographically smallest) one is extended. The result
/// holds every distinct `X(e)` exactly once. Frontier expansion runs on the
/// current rayon pool; ordering and deduplication are sequential.
pub fn enumerate_candidates(
    inst: &Instance,
    limits: EnumerationLimits<'_>,
) -> Result<CandidateSet> {
    let sets = index_sets(inst);
    let choices = Choices::build(inst, &sets)?;
    let within = |x: &[f64]| match limits.bound {
        Some((bound, tol)) => x.iter().zip(bound).all(|(v, u)| *v <= *u + tol),
        None => true,
    };

    let mut pruned = 0u64;
    let mut frontier: Vec<(Vec<usize>, Point)> = vec![(Vec::new(), Point::zeros(inst.n()))];
    for opts in &choices.per_equation {
        let children: Vec<Vec<(Vec<usize>, Point, bool)>> = frontier
            .par_iter()
            .map(|(prefix, x)| {
                opts.iter()
                    .map(|&(j, v)| {
                        let mut y = x.clone();
                        y[j] = y[j].max(v);
                        let ok = within(&y);
                        let mut p = prefix.clone();
                        p.push(j);
                        (p, y, ok)
                    })
                    .collect()
            })
            .collect();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (prefix, y, ok) in children.into_iter().flatten() {
            if !ok {
                pruned += 1;
                continue;
            }
            if seen.insert(point_key(&y)) {
                next.push((prefix, y));
                if let Some(limit) = limits.max_candidates {
                    if next.len() as u64 > limit {
                        return Err(FreError::Size {
                            count: next.len() as u128,
                            limit: limit as u128,
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(CandidateSet {
        unreduced: sets.product_size(),
        pruned,
        candidates: frontier
            .into_iter()
            .map(|(p, x)| (Selection(p), x))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeptCandidate {
    pub selection: Selection,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub feasible: bool,
    #[serde(rename = "Xbar")]
    pub xbar: Point,
    /// 1-based equations with `b_i > 0` and no admissible column.
    pub empty_equations: Vec<usize>,
    /// `prod |J[i]|`.
    pub unreduced_count: u128,
    /// Distinct candidates that survived the `Xbar` bound.
    pub candidate_count: u64,
    /// Partial candidates discarded for exceeding `Xbar`.
    pub pruned_count: u64,
    pub minimal_only: bool,
    pub kept: Vec<KeptCandidate>,
}

#[derive(Debug, Clone, Copy)]
pub struct ResolveOptions {
    pub minimality_filter: bool,
    pub max_candidates: Option<u64>,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            minimality_filter: true,
            max_candidates: None,
        }
    }
}

/// Drops every point strictly dominated by another; among points equal
/// within `tol` the earliest is kept.
pub fn minimal_elements(points: Vec<KeptCandidate>, tol: f64) -> Vec<KeptCandidate> {
    let keep: Vec<bool> = (0..points.len())
        .map(|k| {
            let p = &points[k].point;
            !points.iter().enumerate().any(|(l, q)| {
                l != k && q.point.le_within(p, tol) && (!p.le_within(&q.point, tol) || l < k)
            })
        })
        .collect();
    points
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// Feasibility, then every candidate `X(e) <= Xbar + tol`.
pub fn feasible_candidates(inst: &Instance, opts: ResolveOptions) -> Result<ResolutionReport> {
    let feas = feasibility(inst);
    let unreduced_count = index_sets(inst).product_size();
    if !feas.feasible {
        return Ok(ResolutionReport {
            feasible: false,
            xbar: feas.xbar,
            empty_equations: feas.empty_equations.iter().map(|i| i + 1).collect(),
            unreduced_count,
            candidate_count: 0,
            pruned_count: 0,
            minimal_only: opts.minimality_filter,
            kept: Vec::new(),
        });
    }
    let set = enumerate_candidates(
        inst,
        EnumerationLimits {
            bound: Some((&feas.xbar, inst.tol())),
            max_candidates: opts.max_candidates,
        },
    )?;
    let mut kept: Vec<KeptCandidate> = set
        .candidates
        .into_iter()
        .map(|(selection, point)| KeptCandidate { selection, point })
        .collect();
    let candidate_count = kept.len() as u64;
    if opts.minimality_filter {
        kept = minimal_elements(kept, inst.tol());
    }
    Ok(ResolutionReport {
        feasible: true,
        xbar: feas.xbar,
        empty_equations: Vec::new(),
        unreduced_count,
        candidate_count,
        pruned_count: set.pruned,
        minimal_only: opts.minimality_filter,
        kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DEFAULT_TOL;
    use crate::tnorm::{tnorm_eval, TNormParam};

    fn inst(a: Vec<Vec<f64>>, b: Vec<f64>, lambda: f64) -> Instance {
        let n = a[0].len();
        Instance::new(
            a,
            b,
            vec![1.0; n],
            TNormParam::new(lambda).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap()
    }

    #[test]
    fn index_sets_of_zero_rows() {
        let s = index_sets(&inst(vec![vec![0.0, 0.0, 0.0]], vec![0.0], 2.0));
        assert_eq!(s.get(0), &[0, 1, 2]);
        let s = index_sets(&inst(vec![vec![0.0, 0.0, 0.0]], vec![0.3], 2.0));
        assert!(s.get(0).is_empty());
        assert_eq!(s.empty_equations(), vec![0]);
    }

    #[test]
    fn local_max_zero_rhs_cases() {
        let x = local_max(&inst(vec![vec![0.5, 0.0]], vec![0.0], 2.0), 0);
        assert_eq!(x.0, vec![0.0, 1.0]);
    }

    #[test]
    fn global_max_single_equation_and_zero_rhs() {
        let i1 = inst(vec![vec![0.8, 0.2, 0.5]], vec![0.5], 2.0);
        assert_eq!(global_max(&i1), local_max(&i1, 0));
        let i2 = inst(vec![vec![0.8, 0.2], vec![0.1, 0.9]], vec![0.0, 0.0], 2.0);
        assert_eq!(global_max(&i2).0, vec![0.0, 0.0]);
    }

    #[test]
    fn infeasible_short_circuit() {
        let f = feasibility(&inst(vec![vec![0.2]], vec![0.9], 1.0));
        assert!(!f.feasible);
        assert!(f.short_circuited());
        assert_eq!(f.xbar.0, vec![1.0]);
    }

    #[test]
    fn single_equation_feasible() {
        let i = inst(vec![vec![0.8]], vec![0.5], 2.0);
        let f = feasibility(&i);
        assert!(f.feasible);
        let r = tnorm_residual(0.8, 0.5, i.param()).unwrap();
        assert_eq!(f.xbar.0, vec![r]);
        // independent check of the claimed point
        assert!((tnorm_eval(0.8, r, i.param()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn membership_dimension_error() {
        let i = inst(vec![vec![0.8, 0.1]], vec![0.5], 2.0);
        assert!(matches!(
            membership(&i, &[0.1]),
            Err(FreError::Dimension { .. })
        ));
    }

    #[test]
    fn local_min_candidate_cases() {
        let i = inst(
            vec![vec![0.6, 0.9, 0.1], vec![0.4, 0.4, 0.4]],
            vec![0.6, 0.0],
            2.0,
        );
        assert_eq!(
            local_min_candidate(&i, 0, 0).unwrap().0,
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(local_min_candidate(&i, 1, 2).unwrap().0, vec![0.0; 3]);
        assert_eq!(
            local_min_candidate(&i, 0, 2),
            Err(FreError::Selection {
                equation: 0,
                column: 2
            })
        );
    }

    #[test]
    fn candidate_takes_larger_residual() {
        let i = inst(vec![vec![0.9, 0.1], vec![0.9, 0.1]], vec![0.5, 0.7], 1.0);
        let x = candidate(&i, &Selection(vec![0, 0])).unwrap();
        assert!((x[0] - 0.7 / 0.9).abs() < 1e-12);
        assert_eq!(x[1], 0.0);
        assert!(candidate(&i, &Selection(vec![1, 0])).is_err());
    }

    #[test]
    fn stream_counts() {
        let i = inst(vec![vec![0.1, 0.6, 0.2, 0.1, 0.9]], vec![0.5], 2.0);
        let s = enumerate_selections(&i).unwrap();
        assert_eq!(s.unreduced_count(), 2);
        let all: Vec<_> = s.collect();
        assert_eq!(all, vec![Selection(vec![1]), Selection(vec![4])]);

        let z = inst(vec![vec![0.3, 0.6], vec![0.2, 0.9]], vec![0.0, 0.0], 2.0);
        let s = enumerate_selections(&z).unwrap();
        assert_eq!(s.unreduced_count(), 4);
        assert_eq!(s.count(), 1);
    }

    #[test]
    fn stream_empty_set_error() {
        let i = inst(vec![vec![0.2, 0.1]], vec![0.9], 2.0);
        assert_eq!(
            enumerate_selections(&i).unwrap_err(),
            FreError::EmptySelection { equation: 0 }
        );
    }

    #[test]
    fn unreduced_stream_is_lexicographic() {
        let i = inst(vec![vec![0.9, 0.9], vec![0.9, 0.9]], vec![0.5, 0.5], 2.0);
        let all: Vec<_> = SelectionStream::unreduced(&index_sets(&i))
            .unwrap()
            .collect();
        let want: Vec<Selection> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
            .into_iter()
            .map(Selection)
            .collect();
        assert_eq!(all, want);
    }

    #[test]
    fn two_by_two_minimal_candidate() {
        let i = inst(vec![vec![0.9, 0.3], vec![0.3, 0.9]], vec![0.5, 0.5], 1.0);
        let r = feasible_candidates(&i, ResolveOptions::default()).unwrap();
        assert!(r.feasible);
        assert_eq!(r.kept.len(), 1);
        for v in r.kept[0].point.iter() {
            assert!((v - 5.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn minimal_elements_drops_dominated() {
        let k = |sel: Vec<usize>, p: Vec<f64>| KeptCandidate {
            selection: Selection(sel),
            point: Point(p),
        };
        let pts = vec![
            k(vec![0], vec![0.5, 0.5]),
            k(vec![1], vec![0.5, 0.0]),
            k(vec![2], vec![0.5, 0.0]),
            k(vec![3], vec![0.0, 0.7]),
        ];
        let min = minimal_elements(pts, 1e-9);
        let sels: Vec<_> = min.iter().map(|c| c.selection.0[0]).collect();
        assert_eq!(sels, vec![1, 3]);
    }

    #[test]
    fn enumeration_limit_aborts() {
        let i = inst(
            vec![vec![0.9, 0.8, 0.7, 0.6], vec![0.9, 0.8, 0.7, 0.6]],
            vec![0.5, 0.4],
            2.0,
        );
        let err = enumerate_candidates(
            &i,
            EnumerationLimits {
                bound: None,
                max_candidates: Some(3),
            },
        )
        .unwrap_err();
        assert!(matches!(err, FreError::Size { .. }));
    }
}
