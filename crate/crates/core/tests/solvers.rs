mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{
    all_labelings, full_labeling, optimum, oracle_objective, random_instance, relaxed_objective,
    rng, Shape,
};
use tmb::solvers::search_space_size;
use tmb::{
    add_super_source, brute_force, detect_regime, full_temporal_graph, is_feasible, objective,
    solve_exact, solve_multi_full_mu, solve_single_source, solve_tree, sssp, BruteForceLimits,
    Instance, Labeling, Measure, Regime, Schedule, SolveResult, Status, TmbError,
};

const LIMITS: BruteForceLimits = BruteForceLimits {
    max_edges: 64,
    max_tau: 64,
    max_labelings: 200_000,
};

fn everyone_reaches_everything(inst: &Instance) -> bool {
    inst.sources.iter().all(|&s| {
        sssp(inst, &full_temporal_graph(inst), s, Measure::Ea)
            .unwrap()
            .iter()
            .enumerate()
            .all(|(v, d)| v == s || d.value.is_some())
    })
}

fn check_result(inst: &Instance, res: &SolveResult) -> Result<(), TestCaseError> {
    prop_assert_ne!(res.status, Status::Infeasible);
    prop_assert!(res.labeling.respects_multiplicity(inst));
    prop_assert!(is_feasible(inst, &res.labeling).unwrap());
    prop_assert_eq!(
        objective(inst, &res.labeling, res.measure).unwrap(),
        res.objective
    );
    Ok(())
}

fn ea_or_ld(r: &mut impl Rng) -> Measure {
    if r.gen_bool(0.5) {
        Measure::Ea
    } else {
        Measure::Ld
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn single_source_keeps_per_vertex_values(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, &Shape { n: (2, 7), ..Shape::default() });
        let s = inst.sources[0];
        let full_ea = sssp(&inst, &full_temporal_graph(&inst), s, Measure::Ea).unwrap();
        let full_ld = sssp(&inst, &full_temporal_graph(&inst), s, Measure::Ld).unwrap();
        let (ea, ld) = match (solve_single_source(&inst, Measure::Ea), solve_single_source(&inst, Measure::Ld)) {
            (Ok(ea), Ok(ld)) => (ea, ld),
            _ => {
                prop_assert!(!everyone_reaches_everything(&inst));
                return Ok(());
            }
        };
        check_result(&inst, &ea)?;
        check_result(&inst, &ld)?;
        let got_ea = sssp(&inst, &Schedule::Labeled(&ea.labeling), s, Measure::Ea).unwrap();
        let got_ld = sssp(&inst, &Schedule::Labeled(&ld.labeling), s, Measure::Ld).unwrap();
        let floor = full_ld.iter().filter_map(|d| d.value).min();
        for v in (0..inst.vertex_count()).filter(|&v| v != s) {
            prop_assert_eq!(got_ea[v].value, full_ea[v].value);
            prop_assert!(got_ld[v].value >= floor);
        }
    }

    #[test]
    fn full_multiplicity_uses_one_label_per_source(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut inst = random_instance(&mut r, &Shape { sources: (2, 3), ..Shape::default() });
        let k = inst.sources.len() as u64;
        inst.tau = inst.tau.max(k);
        inst.multiplicity = vec![k; inst.edge_count()];
        let m = ea_or_ld(&mut r);
        match solve_multi_full_mu(&inst, m) {
            Ok(res) => {
                check_result(&inst, &res)?;
                prop_assert!(res.labeling.sets().iter().all(|l| l.len() as u64 <= k));
            }
            Err(_) => prop_assert!(!everyone_reaches_everything(&inst)),
        }
    }

    #[test]
    fn tree_output_lets_every_source_reach_all(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape { tree: true, sources: (2, 4), mu: (2, 2), tau: (2, 6), ..Shape::default() };
        let inst = random_instance(&mut r, &shape);
        prop_assume!(inst.multiplicity.iter().all(|&mu| mu == 2));
        let m = ea_or_ld(&mut r);
        match solve_tree(&inst, m) {
            Ok(res) => {
                check_result(&inst, &res)?;
                prop_assert!(res.labeling.sets().iter().all(|l| l.len() <= 2));
            }
            Err(_) => prop_assert!(!everyone_reaches_everything(&inst)),
        }
    }

    #[test]
    fn brute_force_respects_and_profits_from_multiplicity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape { n: (2, 4), extra_edges: 1, sources: (1, 2), tau: (2, 3), ..Shape::default() };
        let low = random_instance(&mut r, &shape);
        let mut high = low.clone();
        let e = r.gen_range(0..high.edge_count());
        high.multiplicity[e] = (high.multiplicity[e] + 1).min(high.tau);
        prop_assume!(search_space_size(&high) <= 5_000);
        let m = Measure::ALL[r.gen_range(0..6)];
        let a = brute_force(&low, m, LIMITS).unwrap();
        let b = brute_force(&high, m, LIMITS).unwrap();
        prop_assert!(a.labeling.respects_multiplicity(&low));
        prop_assert!(b.labeling.respects_multiplicity(&high));
        match (a.objective, b.objective) {
            (Some(x), Some(y)) => prop_assert!(x == y || m.better(y, x)),
            (Some(_), None) => prop_assert!(false, "more labels lost feasibility"),
            _ => {}
        }
        if let Some(v) = a.objective {
            check_result(&low, &a)?;
            prop_assert_eq!(oracle_objective(&low, &a.labeling, m), Some(v));
        }
    }

    /// Restricting the search to full-size label sets loses nothing.
    #[test]
    fn full_size_label_sets_suffice(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape { n: (2, 4), extra_edges: 0, sources: (1, 2), tau: (2, 3), ..Shape::default() };
        let inst = random_instance(&mut r, &shape);
        prop_assume!(inst.edge_count() <= 3);
        let m = Measure::ALL[r.gen_range(0..6)];
        let every = all_labelings(&inst, true);
        let want = optimum(m, &every, |l| oracle_objective(&inst, l, m));
        prop_assert_eq!(brute_force(&inst, m, LIMITS).unwrap().objective, want);
    }

    #[test]
    fn super_source_optimizes_the_relaxed_objective(seed in any::<u64>()) {
        let mut r = rng(seed);
        let shape = Shape { n: (2, 4), extra_edges: 1, sources: (2, 3), tau: (2, 3), mu: (1, 1), ..Shape::default() };
        let inst = random_instance(&mut r, &shape);
        let sup = add_super_source(&inst).unwrap();
        prop_assert_eq!(sup.vertex_count(), inst.vertex_count() + 1);
        prop_assert_eq!(sup.edge_count(), inst.edge_count() + inst.sources.len());
        prop_assert_eq!(sup.sources.clone(), vec![inst.vertex_count()]);
        let m = ea_or_ld(&mut r);
        let labelings = all_labelings(&inst, false);
        prop_assume!(labelings.len() <= 2_000);
        let want = optimum(m, &labelings, |l| relaxed_objective(&inst, l, m));
        let star = full_labeling(&sup);
        let got = optimum(m, &labelings, |l| {
            let mut sets = l.sets().to_vec();
            sets.extend_from_slice(&star.sets()[inst.edge_count()..]);
            objective(&sup, &Labeling::new(sets), m).unwrap()
        });
        prop_assert_eq!(got, want);
    }
}

#[test]
fn regimes_are_detected_in_order() {
    let mut r = rng(3);
    let shape = Shape {
        n: (4, 5),
        sources: (2, 2),
        mu: (1, 1),
        ..Shape::default()
    };
    let mut inst = random_instance(&mut r, &shape);
    while inst.graph.is_tree() {
        inst = random_instance(&mut r, &shape);
    }
    for m in [Measure::Ft, Measure::St, Measure::Mh, Measure::Mw] {
        assert!(matches!(
            detect_regime(&inst, m),
            Err(TmbError::NoTractableRegime(_))
        ));
    }
    assert!(matches!(
        solve_exact(&inst, Measure::Ea),
        Err(TmbError::NoTractableRegime(_))
    ));
    let mut one = inst.clone();
    one.sources.truncate(1);
    assert_eq!(
        detect_regime(&one, Measure::Ld).unwrap(),
        Regime::SingleSource
    );
    let mut full = inst.clone();
    full.tau = full.tau.max(2);
    full.multiplicity = vec![2; full.edge_count()];
    assert_eq!(
        detect_regime(&full, Measure::Ea).unwrap(),
        Regime::FullMultiplicity
    );
    let tree = random_instance(
        &mut r,
        &Shape {
            tree: true,
            sources: (3, 3),
            mu: (2, 2),
            tau: (2, 5),
            ..shape
        },
    );
    if tree.multiplicity.iter().all(|&mu| mu == 2) {
        assert_eq!(detect_regime(&tree, Measure::Ea).unwrap(), Regime::Tree);
    }
}

#[test]
fn oversized_search_is_refused() {
    let mut r = rng(4);
    let inst = random_instance(
        &mut r,
        &Shape {
            n: (6, 6),
            ..Shape::default()
        },
    );
    let tight = BruteForceLimits {
        max_edges: 1,
        ..LIMITS
    };
    assert!(matches!(
        brute_force(&inst, Measure::Ea, tight),
        Err(TmbError::SearchSpaceTooLarge(_))
    ));
}
