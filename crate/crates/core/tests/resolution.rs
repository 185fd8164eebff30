use aafre::instance::Point;
use aafre::optimizer::{
    merge_optimum, minimize_z1, minimize_z1_pruned, solve, split_cost, SolveOptions,
};
use aafre::oracle::{generate_feasible, generate_with_witness, satisfies, GeneratorConfig};
use aafre::resolution::{
    candidate, enumerate_candidates, enumerate_selections, feasibility, feasible_candidates,
    global_max, index_sets, local_max, membership, EnumerationLimits, ResolveOptions,
    SelectionStream,
};
use aafre::{FreError, Instance, TNormParam};
use proptest::prelude::*;

fn config() -> impl Strategy<Value = GeneratorConfig> {
    (
        1usize..=4,
        1usize..=5,
        0.4..=1.0f64,
        0.3f64.ln()..8f64.ln(),
        any::<u64>(),
    )
        .prop_map(|(m, n, density, l, seed)| GeneratorConfig {
            m,
            n,
            density,
            lambda: TNormParam::new(l.exp()).unwrap(),
            seed,
        })
}

fn instance() -> impl Strategy<Value = Instance> {
    config().prop_map(|cfg| generate_feasible(&cfg).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_instances_are_feasible(inst in instance()) {
        let f = feasibility(&inst);
        prop_assert!(f.feasible);
        prop_assert!(satisfies(&inst, &f.xbar));
    }

    #[test]
    fn xbar_is_min_of_local_maxima(inst in instance()) {
        let xbar = global_max(&inst);
        for i in 0..inst.m() {
            let xi = local_max(&inst, i);
            prop_assert!(xbar.le_within(&xi, 0.0));
        }
    }

    #[test]
    fn witness_lies_below_xbar(cfg in config()) {
        let (inst, w) = generate_with_witness(&cfg, None).unwrap();
        prop_assert!(membership(&inst, &w).unwrap());
        prop_assert!(w.le_within(&global_max(&inst), inst.tol()));
    }

    #[test]
    fn reduced_points_equal_unreduced_points(inst in instance()) {
        let sets = index_sets(&inst);
        prop_assume!(sets.product_size() <= 500);
        let full: Vec<Point> = SelectionStream::unreduced(&sets)
            .unwrap()
            .map(|e| candidate(&inst, &e).unwrap())
            .collect();
        let reduced = enumerate_candidates(&inst, EnumerationLimits::default()).unwrap();
        for (e, x) in &reduced.candidates {
            prop_assert_eq!(&candidate(&inst, e).unwrap(), x);
            prop_assert!(full.iter().any(|y| y.max_abs_diff(x) <= 1e-9));
        }
        for y in &full {
            prop_assert!(reduced.candidates.iter().any(|(_, x)| y.max_abs_diff(x) <= 1e-9));
        }
        let cheap: Vec<_> = enumerate_selections(&inst).unwrap().collect();
        for y in &full {
            prop_assert!(cheap.iter().any(|e| candidate(&inst, e).unwrap().max_abs_diff(y) <= 1e-9));
        }
    }

    #[test]
    fn kept_candidates_are_solutions_below_xbar(inst in instance()) {
        let r = feasible_candidates(&inst, ResolveOptions { minimality_filter: false, max_candidates: None }).unwrap();
        prop_assert!(!r.kept.is_empty());
        for k in &r.kept {
            prop_assert!(membership(&inst, &k.point).unwrap());
            prop_assert!(k.point.le_within(&r.xbar, inst.tol()));
        }
    }

    #[test]
    fn minimal_filter_keeps_an_antichain(inst in instance()) {
        let r = feasible_candidates(&inst, ResolveOptions::default()).unwrap();
        for (k, p) in r.kept.iter().enumerate() {
            for (l, q) in r.kept.iter().enumerate() {
                if k != l {
                    prop_assert!(!(q.point.le_within(&p.point, 0.0) && q.point != p.point));
                }
            }
        }
    }

    #[test]
    fn optimum_is_feasible_and_merged(inst in instance()) {
        let r = solve(&inst, SolveOptions::default()).unwrap();
        let x = r.x_star.clone().unwrap();
        let xe = r.x_e_star.clone().unwrap();
        prop_assert!(membership(&inst, &x).unwrap());
        prop_assert_eq!(&merge_optimum(&inst, &r.xbar, &xe), &x);
        prop_assert!((inst.objective(&x) - r.z_star.unwrap()).abs() <= 1e-12);
        let split = split_cost(inst.c());
        for j in 0..inst.n() {
            prop_assert!(split.plus[j] >= 0.0 && split.minus[j] <= 0.0);
            prop_assert_eq!(split.plus[j] + split.minus[j], inst.c()[j]);
        }
    }

    #[test]
    fn pruned_matches_exhaustive(inst in instance()) {
        let scan = feasible_candidates(&inst, ResolveOptions { minimality_filter: false, max_candidates: None }).unwrap();
        let a = minimize_z1(&inst, &scan).unwrap();
        let (b, _) = minimize_z1_pruned(&inst, &scan.xbar).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn worker_count_does_not_change_the_result(inst in instance(), w in 1usize..4) {
        let a = solve(&inst, SolveOptions::default()).unwrap();
        let b = solve(&inst, SolveOptions { workers: Some(w), ..Default::default() }).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn inflated_right_hand_side_is_infeasible(inst in instance(), pick in any::<prop::sample::Index>(), u in 0.01..=1.0f64) {
        let i = pick.index(inst.m());
        let row_max = inst.row(i).iter().copied().fold(0.0, f64::max);
        prop_assume!(row_max < 1.0);
        let mut b = inst.b().to_vec();
        b[i] = row_max + (1.0 - row_max) * u;
        let mutant = inst.with_b(b).unwrap();
        let f = feasibility(&mutant);
        prop_assert!(!f.feasible && f.short_circuited());
        prop_assert!(f.empty_equations.contains(&i));
        let empty = matches!(enumerate_selections(&mutant), Err(FreError::EmptySelection { .. }));
        prop_assert!(empty);
    }
}

#[test]
fn frontier_limit_reports_size_error() {
    let cfg = GeneratorConfig {
        m: 6,
        n: 8,
        density: 1.0,
        lambda: TNormParam::new(2.0).unwrap(),
        seed: 3,
    };
    let inst = generate_feasible(&cfg).unwrap();
    let err = solve(
        &inst,
        SolveOptions {
            max_candidates: Some(1),
            ..Default::default()
        },
    );
    assert!(matches!(err, Err(FreError::Size { .. })));
}

#[test]
fn zero_right_hand_side_keeps_one_choice() {
    let inst = Instance::new(
        vec![vec![0.4, 0.0, 0.0], vec![0.9, 0.5, 0.6]],
        vec![0.0, 0.5],
        vec![1.0, 1.0, 1.0],
        TNormParam::new(2.0).unwrap(),
        1e-9,
    )
    .unwrap();
    let s = enumerate_selections(&inst).unwrap();
    assert_eq!(s.unreduced_count(), 9);
    assert_eq!(s.reduced_count(), 3);
    let r = solve(&inst, SolveOptions::default()).unwrap();
    assert!(r.feasible);
}
