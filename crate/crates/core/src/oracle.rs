//! Brute-force verification support.
//!
//! Nothing here calls the residual or the resolution code. Preimages are
//! found by bisection over the bit patterns of `[0, 1]` using only
//! [`tnorm_eval`], selections are enumerated without reduction, and every
//! candidate is accepted or rejected by evaluating the equations directly.

use crate::error::{FreError, Result};
use crate::instance::{Instance, Point, Selection, DEFAULT_TOL};
use crate::tnorm::{tnorm_eval, tnorm_residual, TNormParam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest unreduced selection count [`brute_force_solve`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub m: usize,
    pub n: usize,
    /// Fraction of non-zero entries in `A`.
    pub density: f64,
    pub lambda: TNormParam,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.m) {
            return Err(FreError::validation("m", "must be in 1..=6"));
        }
        if !(1..=8).contains(&self.n) {
            return Err(FreError::validation("n", "must be in 1..=8"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(FreError::validation("density", "must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Witness draws attempted before giving up on a coefficient matrix.
const WITNESS_ATTEMPTS: usize = 1000;

/// Smallest accepted gap between `b_i` and a larger coefficient of row `i`.
const MIN_GAP: f64 = 1e-6;

/// A random instance with a known solution: `b` is the composition of `A`
/// with a sampled witness point.
///
/// When some `b_i` lands just below a coefficient, the t-norm is nearly flat
/// in `x` there and rounding `b_i` moves its preimage far from the witness;
/// the stored system can then be unsolvable in exact arithmetic even though
/// the witness satisfies it within tolerance. Witnesses are redrawn until
/// every `b_i` is either equal to or at least `1e-6` below each larger
/// coefficient of its row, and the greatest point below `b` solves the
/// system.
pub fn generate_feasible(cfg: &GeneratorConfig) -> Result<Instance> {
    generate_with_witness(cfg, None).map(|(inst, _)| inst)
}

/// As [`generate_feasible`], optionally with a caller-chosen witness. A
/// supplied witness is used as is, without the feasibility retry.
pub fn generate_with_witness(
    cfg: &GeneratorConfig,
    witness: Option<Vec<f64>>,
) -> Result<(Instance, Point)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a: Vec<Vec<f64>> = (0..cfg.m)
        .map(|_| {
            (0..cfg.n)
                .map(|_| {
                    if rng.gen_bool(cfg.density) {
                        rng.gen_range(0.05..=1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let c: Vec<f64> = (0..cfg.n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
    let build = |w: &[f64]| {
        let b: Vec<f64> = a.iter().map(|row| compose(row, w, cfg.lambda)).collect();
        Instance::new(a.clone(), b, c.clone(), cfg.lambda, DEFAULT_TOL)
    };
    if let Some(w) = witness {
        if w.len() != cfg.n {
            return Err(FreError::Dimension {
                expected: cfg.n,
                got: w.len(),
            });
        }
        return Ok((build(&w)?, Point(w)));
    }
    for _ in 0..WITNESS_ATTEMPTS {
        let w: Vec<f64> = (0..cfg.n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let inst = build(&w)?;
        let separated = inst
            .a()
            .iter()
            .zip(inst.b())
            .all(|(row, &bi)| row.iter().all(|&aij| aij <= bi || aij - bi >= MIN_GAP));
        if separated && satisfies(&inst, &upper_bound_point(&inst)) {
            return Ok((inst, Point(w)));
        }
    }
    Err(FreError::Domain(format!(
        "no well-conditioned witness found in {WITNESS_ATTEMPTS} draws for seed {}",
        cfg.seed
    )))
}

fn compose(row: &[f64], x: &[f64], p: TNormParam) -> f64 {
    row.iter()
        .zip(x)
        .map(|(&a, &v)| tnorm_eval(a, v, p))
        .fold(0.0, f64::max)
}

/// Equation-by-equation check, independent of the resolution module.
pub fn satisfies(inst: &Instance, x: &[f64]) -> bool {
    x.len() == inst.n()
        && inst
            .a()
            .iter()
            .zip(inst.b())
            .all(|(row, &b)| (compose(row, x, inst.param()) - b).abs() <= inst.tol())
}

/// Smallest float in `[0, 1]` satisfying a predicate that is false below
/// some threshold and true above it. `pred(1.0)` must hold.
fn first_true(pred: impl Fn(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0u64, 1.0f64.to_bits());
    if pred(0.0) {
        return 0.0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(f64::from_bits(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    f64::from_bits(hi)
}

/// `inf { x : T(a, x) >= b }` for `a >= b`.
///
/// For `a == b > 0` this is exactly 1 because the t-norm is strictly
/// increasing; computed `T(a, .)` is flat just below 1 when `lambda > 1`,
/// so bisection alone would stop short.
pub fn lower_preimage(a: f64, b: f64, p: TNormParam) -> f64 {
    if a == b && b > 0.0 {
        return 1.0;
    }
    first_true(|x| tnorm_eval(a, x, p) >= b)
}

/// `sup { x : T(a, x) <= b }`.
pub fn upper_preimage(a: f64, b: f64, p: TNormParam) -> f64 {
    if tnorm_eval(a, 1.0, p) <= b {
        return 1.0;
    }
    let above = first_true(|x| tnorm_eval(a, x, p) > b);
    f64::from_bits(above.to_bits() - 1)
}

/// Greatest point with every composition at most `b`.
pub fn upper_bound_point(inst: &Instance) -> Point {
    let p = inst.param();
    (0..inst.n())
        .map(|j| {
            (0..inst.m())
                .map(|i| upper_preimage(inst.row(i)[j], inst.b()[i], p))
                .fold(1.0, f64::min)
        })
        .collect::<Vec<_>>()
        .into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCandidate {
    pub selection: Selection,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOutcome {
    pub feasible: bool,
    pub upper: Point,
    pub x_star: Option<Point>,
    pub z_star: Option<f64>,
    /// Every selection whose candidate satisfies the system, in
    /// lexicographic order (duplicates included).
    pub feasible_candidates: Vec<OracleCandidate>,
    pub selections_examined: u128,
    pub samples_checked: usize,
    /// Box samples that beat `z_star` by more than the tolerance.
    pub sample_violations: Vec<Point>,
}

/// Exhaustive solve: every selection, direct membership, merge with the
/// upper bound per sign of `c`, then `samples` random points drawn from the
/// feasible boxes to confirm nothing beats the returned optimum.
pub fn brute_force_solve(inst: &Instance, samples: usize, seed: u64) -> Result<BruteForceOutcome> {
    let p = inst.param();
    let sets: Vec<Vec<usize>> = (0..inst.m())
        .map(|i| {
            (0..inst.n())
                .filter(|&j| inst.row(i)[j] >= inst.b()[i])
                .collect()
        })
        .collect();
    let total = sets
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if total > BRUTE_FORCE_LIMIT {
        return Err(FreError::Size {
            count: total,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let upper = upper_bound_point(inst);
    let mut outcome = BruteForceOutcome {
        feasible: false,
        upper: upper.clone(),
        x_star: None,
        z_star: None,
        feasible_candidates: Vec::new(),
        selections_examined: total,
        samples_checked: 0,
        sample_violations: Vec::new(),
    };
    if total == 0 {
        return Ok(outcome);
    }

    let lower: Vec<Vec<f64>> = (0..inst.m())
        .map(|i| {
            (0..inst.n())
                .map(|j| lower_preimage(inst.row(i)[j], inst.b()[i], p))
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; inst.m()];
    'outer: loop {
        let mut x = vec![0.0f64; inst.n()];
        for (i, &k) in idx.iter().enumerate() {
            let j = sets[i][k];
            x[j] = x[j].max(lower[i][j]);
        }
        if satisfies(inst, &x) {
            let merged: Vec<f64> = (0..inst.n())
                .map(|j| if inst.c()[j] < 0.0 { upper[j] } else { x[j] })
                .collect();
            if satisfies(inst, &merged) {
                let z = inst.objective(&merged);
                if outcome.z_star.is_none_or(|best| z < best) {
                    outcome.z_star = Some(z);
                    outcome.x_star = Some(Point(merged));
                }
            }
            outcome.feasible_candidates.push(OracleCandidate {
                selection: Selection(idx.iter().zip(&sets).map(|(&k, s)| s[k]).collect()),
                point: Point(x),
            });
        }
        let mut i = idx.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < sets[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
    outcome.feasible = !outcome.feasible_candidates.is_empty();

    if let Some(z_star) = outcome.z_star {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let boxes = &outcome.feasible_candidates;
        for _ in 0..samples {
            let lo = &boxes[rng.gen_range(0..boxes.len())].point;
            let x = sample_in_box(&mut rng, lo, &upper);
            outcome.samples_checked += 1;
            if satisfies(inst, &x) && inst.objective(&x) < z_star - inst.tol() {
                outcome.sample_violations.push(Point(x));
            }
        }
    }
    Ok(outcome)
}

/// A point of `[lo, hi]` with each coordinate at an endpoint or uniform
/// inside, in equal proportion.
fn sample_in_box(rng: &mut impl Rng, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    lo.iter()
        .zip(hi)
        .map(|(&l, &h)| {
            let h = h.max(l);
            match rng.gen_range(0..3) {
                0 => l,
                1 => h,
                _ => rng.gen_range(l..=h),
            }
        })
        .collect()
}

/// Feasible points found by two routes: box samples above oracle
/// candidates, and random points below the upper bound with coordinates
/// snapped to it, kept only when they satisfy every equation.
pub fn sample_feasible_points(
    inst: &Instance,
    outcome: &BruteForceOutcome,
    count: usize,
    seed: u64,
) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if !outcome.feasible {
        return out;
    }
    let boxes = &outcome.feasible_candidates;
    for k in 0..count {
        let x = if k % 2 == 0 {
            let lo = &boxes[rng.gen_range(0..boxes.len())].point;
            sample_in_box(&mut rng, lo, &outcome.upper)
        } else {
            let snap = rng.gen_range(0.3..0.9);
            outcome
                .upper
                .iter()
                .map(|&u| {
                    if rng.gen_bool(snap) {
                        u
                    } else {
                        rng.gen_range(0.0..=u)
                    }
                })
                .collect()
        };
        if satisfies(inst, &x) {
            out.push(Point(x));
        }
    }
    out
}

/// Recovers `lambda` from observed `(a, b, x)` with `T(a, x) = b`.
///
/// Golden-section search on the squared residual error over
/// `lambda` in `[0.1, 50]`, started from the best point of a coarse
/// logarithmic grid. Fails if the worst triple is off by more than `1e-3`.
pub fn fit_lambda(values: &[(f64, f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64, f64)> = values
        .iter()
        .copied()
        .filter(|&(a, b, x)| a > b && b > 0.0 && a <= 1.0 && x > 0.0 && x < 1.0)
        .collect();
    if usable.is_empty() {
        return Err(FreError::Fit(
            "no triple with a > b > 0 and 0 < x < 1; lambda is underdetermined".to_string(),
        ));
    }
    if usable.len() != values.len() {
        return Err(FreError::Fit(
            "every triple needs a > b > 0 and 0 < x < 1".to_string(),
        ));
    }
    let sse = |lambda: f64| -> f64 {
        let p = TNormParam::new(lambda).expect("search stays positive");
        usable
            .iter()
            .map(|&(a, b, x)| {
                let r = tnorm_residual(a, b, p).expect("a > b > 0");
                (r - x).powi(2)
            })
            .sum()
    };

    let (lo, hi) = (0.1f64, 50.0f64);
    let steps = 200;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / steps as f64).exp())
        .collect();
    let best = (0..grid.len())
        .min_by(|&x, &y| sse(grid[x]).total_cmp(&sse(grid[y])))
        .expect("grid is non-empty");
    let mut left = grid[best.saturating_sub(1)];
    let mut right = grid[(best + 1).min(steps)];

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = right - ratio * (right - left);
    let mut x2 = left + ratio * (right - left);
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    while right - left > 1e-10 * (1.0 + left.abs()) {
        if f1 <= f2 {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - ratio * (right - left);
            f1 = sse(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + ratio * (right - left);
            f2 = sse(x2);
        }
    }
    let lambda = 0.5 * (left + right);
    let p = TNormParam::new(lambda)?;
    let worst = usable
        .iter()
        .map(|&(a, b, x)| (tnorm_residual(a, b, p).expect("a > b > 0") - x).abs())
        .fold(0.0, f64::max);
    if worst > 1e-3 {
        return Err(FreError::Fit(format!(
            "best lambda {lambda} leaves an error of {worst}"
        )));
    }
    Ok(lambda)
}
