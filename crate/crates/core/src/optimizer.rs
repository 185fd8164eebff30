//! Linear objective over the feasible set.
//!
//! The cost splits by sign. The non-positive part is minimized by `Xbar`
//! (the largest feasible point) and the non-negative part by the best
//! candidate `X(e*)`; the optimum takes `Xbar_j` where `c_j < 0` and
//! `X(e*)_j` elsewhere, which stays inside the box `[X(e*), Xbar]`.

use crate::error::{FreError, Result};
use crate::instance::{Instance, Point, Selection};
use crate::resolution::{
    feasibility, feasible_candidates, index_sets, Choices, ResolutionReport, ResolveOptions,
};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq)]
pub struct CostSplit {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Zero costs land in `plus`.
pub fn split_cost(c: &[f64]) -> CostSplit {
    CostSplit {
        plus: c.iter().map(|&v| if v >= 0.0 { v } else { 0.0 }).collect(),
        minus: c.iter().map(|&v| if v < 0.0 { v } else { 0.0 }).collect(),
    }
}

/// `sum_j c+_j x_j`, summed in column order. Every term is non-negative,
/// so the value never decreases as components of `x` grow.
pub fn z1(plus: &[f64], x: &[f64]) -> f64 {
    plus.iter().zip(x).map(|(c, v)| c * v).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Z1Optimum {
    pub selection: Selection,
    pub point: Point,
    pub value: f64,
}

/// Best kept candidate for the non-negative part of the cost; ties go to
/// the lexicographically smallest selection.
///
/// For tie-breaking to match the pruned search, `report` should be built
/// without the minimality filter.
pub fn minimize_z1(inst: &Instance, report: &ResolutionReport) -> Result<Z1Optimum> {
    if !report.feasible {
        return Err(FreError::Infeasible);
    }
    let plus = split_cost(inst.c()).plus;
    let mut best: Option<Z1Optimum> = None;
    for k in &report.kept {
        let value = z1(&plus, &k.point);
        let better = match &best {
            None => true,
            Some(b) => value < b.value || (value == b.value && k.selection < b.selection),
        };
        if better {
            best = Some(Z1Optimum {
                selection: k.selection.clone(),
                point: k.point.clone(),
                value,
            });
        }
    }
    best.ok_or(FreError::Infeasible)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub leaves: u64,
    pub pruned: u64,
}

struct BranchAndBound<'a> {
    choices: &'a [Vec<(usize, f64)>],
    plus: &'a [f64],
    xbar: &'a [f64],
    tol: f64,
    visited: Vec<HashSet<Vec<u64>>>,
    prefix: Vec<usize>,
    best: Option<Z1Optimum>,
    stats: SearchStats,
}

impl BranchAndBound<'_> {
    fn descend(&mut self, depth: usize, x: &Point) {
        if !x.le_within(self.xbar, self.tol) {
            self.stats.pruned += 1;
            return;
        }
        let value = z1(self.plus, x);
        if let Some(b) = &self.best {
            // any completion is at least as costly and lexicographically later
            if value >= b.value {
                self.stats.pruned += 1;
                return;
            }
        }
        if depth == self.choices.len() {
            self.stats.leaves += 1;
            self.best = Some(Z1Optimum {
                selection: Selection(self.prefix.clone()),
                point: x.clone(),
                value,
            });
            return;
        }
        // an earlier prefix reaching the same partial point already covered
        // every completion of this one
        if !self.visited[depth].insert(x.iter().map(|v| v.to_bits()).collect()) {
            self.stats.pruned += 1;
            return;
        }
        for &(j, v) in &self.choices[depth] {
            let mut y = x.clone();
            y[j] = y[j].max(v);
            self.prefix.push(j);
            self.descend(depth + 1, &y);
            self.prefix.pop();
        }
    }
}

/// Depth-first search for the `Z1` optimum with bound pruning on partial
/// selections. Returns the same optimum as [`minimize_z1`] on an
/// unfiltered report.
pub fn minimize_z1_pruned(inst: &Instance, xbar: &[f64]) -> Result<(Z1Optimum, SearchStats)> {
    let choices = Choices::build(inst, &index_sets(inst))?;
    let plus = split_cost(inst.c()).plus;
    let mut bb = BranchAndBound {
        choices: &choices.per_equation,
        plus: &plus,
        xbar,
        tol: inst.tol(),
        visited: vec![HashSet::new(); inst.m()],
        prefix: Vec::with_capacity(inst.m()),
        best: None,
        stats: SearchStats::default(),
    };
    bb.descend(0, &Point::zeros(inst.n()));
    let stats = bb.stats;
    bb.best.map(|b| (b, stats)).ok_or(FreError::Infeasible)
}

/// `x*_j = Xbar_j` where `c_j < 0`, else `X(e*)_j`.
pub fn merge_optimum(inst: &Instance, xbar: &[f64], x_e_star: &[f64]) -> Point {
    inst.c()
        .iter()
        .zip(xbar.iter().zip(x_e_star))
        .map(|(&c, (&hi, &lo))| if c < 0.0 { hi } else { lo })
        .collect::<Vec<_>>()
        .into()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Branch-and-bound search for `Z1` instead of a full scan.
    pub prune: bool,
    /// Report every candidate tied with the `Z1` optimum.
    pub all_optima: bool,
    pub max_candidates: Option<u64>,
    /// Worker threads for candidate enumeration; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub e: Selection,
    pub x: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub feasible: bool,
    #[serde(rename = "Xbar")]
    pub xbar: Point,
    /// 1-based equations with `b_i > 0` and no admissible column.
    pub empty_equations: Vec<usize>,
    pub x_star: Option<Point>,
    pub z_star: Option<f64>,
    pub e_star: Option<Selection>,
    #[serde(rename = "X_e_star")]
    pub x_e_star: Option<Point>,
    pub z1_value: Option<f64>,
    pub unreduced_count: u128,
    pub candidates_examined: u64,
    pub candidates_pruned: u64,
    pub pruned_search: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optima: Vec<Optimum>,
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| FreError::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Index sets, `Xbar`, feasibility, candidates, `Z1` optimum, merge.
pub fn solve(inst: &Instance, opts: SolveOptions) -> Result<OptimizationReport> {
    let feas = feasibility(inst);
    let unreduced_count = index_sets(inst).product_size();
    let mut report = OptimizationReport {
        feasible: feas.feasible,
        xbar: feas.xbar.clone(),
        empty_equations: feas.empty_equations.iter().map(|i| i + 1).collect(),
        x_star: None,
        z_star: None,
        e_star: None,
        x_e_star: None,
        z1_value: None,
        unreduced_count,
        candidates_examined: 0,
        candidates_pruned: 0,
        pruned_search: opts.prune,
        optima: Vec::new(),
    };
    if !feas.feasible {
        return Ok(report);
    }

    let resolve_opts = ResolveOptions {
        minimality_filter: false,
        max_candidates: opts.max_candidates,
    };
    let needs_scan = !opts.prune || opts.all_optima;
    let scan = if needs_scan {
        Some(with_workers(opts.workers, || {
            feasible_candidates(inst, resolve_opts)
        })??)
    } else {
        None
    };

    let best = if opts.prune {
        let (best, stats) = minimize_z1_pruned(inst, &feas.xbar)?;
        report.candidates_examined = stats.leaves;
        report.candidates_pruned = stats.pruned;
        best
    } else {
        let scan = scan.as_ref().expect("scan runs when not pruning");
        report.candidates_examined = scan.candidate_count;
        report.candidates_pruned = scan.pruned_count;
        minimize_z1(inst, scan)?
    };

    let x_star = merge_optimum(inst, &feas.xbar, &best.point);
    if opts.all_optima {
        let plus = split_cost(inst.c()).plus;
        let scan = scan.as_ref().expect("scan runs for all optima");
        report.optima = scan
            .kept
            .iter()
            .filter(|k| (z1(&plus, &k.point) - best.value).abs() <= inst.tol())
            .map(|k| Optimum {
                e: k.selection.clone(),
                x: merge_optimum(inst, &feas.xbar, &k.point),
            })
            .collect();
    }
    report.z_star = Some(inst.objective(&x_star));
    report.x_star = Some(x_star);
    report.e_star = Some(best.selection);
    report.x_e_star = Some(best.point);
    report.z1_value = Some(best.value);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DEFAULT_TOL;
    use crate::resolution::membership;
    use crate::tnorm::TNormParam;

    fn inst(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>, lambda: f64) -> Instance {
        Instance::new(a, b, c, TNormParam::new(lambda).unwrap(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn split_examples() {
        let s = split_cost(&[-7.6648, 4.9208]);
        assert_eq!(s.plus, vec![0.0, 4.9208]);
        assert_eq!(s.minus, vec![-7.6648, 0.0]);
        let s = split_cost(&[0.0, 0.0]);
        assert_eq!((s.plus, s.minus), (vec![0.0, 0.0], vec![0.0, 0.0]));
        let s = split_cost(&[3.0]);
        assert_eq!((s.plus, s.minus), (vec![3.0], vec![0.0]));
    }

    #[test]
    fn split_sums_back_exactly() {
        let c = [-1.5, 0.0, 2.25, -0.0, 1e-300];
        let s = split_cost(&c);
        for (j, &cj) in c.iter().enumerate() {
            assert_eq!(s.plus[j] + s.minus[j], cj);
        }
    }

    #[test]
    fn merge_by_sign() {
        let i = inst(vec![vec![0.9, 0.9]], vec![0.5], vec![1.0, 2.0], 2.0);
        assert_eq!(
            merge_optimum(&i, &[0.8, 0.9], &[0.1, 0.0]).0,
            vec![0.1, 0.0]
        );
        let i = i.with_c(vec![-1.0, -2.0]).unwrap();
        assert_eq!(
            merge_optimum(&i, &[0.8, 0.9], &[0.1, 0.0]).0,
            vec![0.8, 0.9]
        );
    }

    #[test]
    fn infeasible_report() {
        let i = inst(vec![vec![0.2]], vec![0.9], vec![1.0], 1.0);
        let r = solve(&i, SolveOptions::default()).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.empty_equations, vec![1]);
        assert!(r.x_star.is_none());
        let scan = feasible_candidates(&i, ResolveOptions::default()).unwrap();
        assert_eq!(minimize_z1(&i, &scan), Err(FreError::Infeasible));
    }

    #[test]
    fn nonpositive_cost_takes_first_candidate() {
        let i = inst(
            vec![vec![0.9, 0.8, 0.7], vec![0.6, 0.9, 0.95]],
            vec![0.5, 0.5],
            vec![-1.0, -2.0, 0.0],
            2.0,
        );
        let scan = feasible_candidates(
            &i,
            ResolveOptions {
                minimality_filter: false,
                max_candidates: None,
            },
        )
        .unwrap();
        let best = minimize_z1(&i, &scan).unwrap();
        assert_eq!(best.value, 0.0);
        assert_eq!(best.selection, scan.kept[0].selection);
    }

    #[test]
    fn zero_cost_gives_zero_objective() {
        let i = inst(
            vec![vec![0.9, 0.8], vec![0.6, 0.9]],
            vec![0.5, 0.5],
            vec![0.0, 0.0],
            2.0,
        );
        let r = solve(&i, SolveOptions::default()).unwrap();
        assert_eq!(r.z_star, Some(0.0));
        assert!(membership(&i, r.x_star.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn pruned_matches_exhaustive_small() {
        let i = inst(
            vec![
                vec![0.9, 0.8, 0.7],
                vec![0.6, 0.9, 0.95],
                vec![0.7, 0.7, 0.7],
            ],
            vec![0.5, 0.55, 0.6],
            vec![3.0, -1.0, 2.0],
            1.7,
        );
        let a = solve(&i, SolveOptions::default()).unwrap();
        let b = solve(
            &i,
            SolveOptions {
                prune: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a.e_star, b.e_star);
        assert_eq!(a.z1_value, b.z1_value);
        assert_eq!(a.z_star, b.z_star);
    }

    #[test]
    fn all_optima_contains_e_star() {
        let i = inst(
            vec![vec![0.9, 0.9, 0.3], vec![0.9, 0.9, 0.3]],
            vec![0.5, 0.5],
            vec![1.0, 1.0, 0.0],
            2.0,
        );
        let r = solve(
            &i,
            SolveOptions {
                all_optima: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.optima.len(), 2);
        assert_eq!(&r.optima[0].e, r.e_star.as_ref().unwrap());
    }

    #[test]
    fn workers_do_not_change_result() {
        let i = inst(
            vec![vec![0.9, 0.8, 0.7, 0.75], vec![0.6, 0.9, 0.95, 0.8]],
            vec![0.5, 0.55],
            vec![3.0, -1.0, 2.0, 1.0],
            2.5,
        );
        let a = solve(&i, SolveOptions::default()).unwrap();
        let b = solve(
            &i,
            SolveOptions {
                workers: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
