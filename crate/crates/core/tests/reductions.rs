mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{
    all_labelings, non_separating_path_exists, random_graph, random_instance, random_labeling, rng,
    sat_feasible_unit, Shape,
};
use tmb::io::{self, InstanceFile};
use tmb::reductions::{
    apply_shifts, gen_single_source_gadget, gen_two_source_gadget, reachfast_to_tmb, regenerate,
    shift_schedule, tmb_to_reachfast, two_source_path, witness_labeling, Assignment, CnfFormula,
    GadgetParams, Literal,
};
use tmb::{
    is_feasible, objective, Instance, Measure, ReachFastInstance, StaticGraph, TraversalSpec,
};

fn random_formula(
    r: &mut ChaCha8Rng,
    max_vars: usize,
    max_clauses: usize,
    width: (usize, usize),
) -> CnfFormula {
    let vars = r.gen_range(1..=max_vars);
    let clauses = r.gen_range(1..=max_clauses);
    let cs = (0..clauses)
        .map(|_| loop {
            let k = r.gen_range(width.0..=width.1);
            let c: Vec<Literal> = (0..k)
                .map(|_| {
                    let v = r.gen_range(0..vars);
                    if r.gen_bool(0.5) {
                        Literal::pos(v)
                    } else {
                        Literal::neg(v)
                    }
                })
                .collect();
            if !c.iter().any(|l| {
                c.contains(&Literal {
                    var: l.var,
                    positive: !l.positive,
                })
            }) {
                break c;
            }
        })
        .collect();
    CnfFormula::new(vars, cs).unwrap()
}

fn assignments(p: usize) -> impl Iterator<Item = Assignment> {
    (0u32..1 << p).map(move |mask| Assignment::new((0..p).map(|i| mask >> i & 1 == 1).collect()))
}

fn unit_instance(g: StaticGraph, sources: Vec<usize>, tau: u64) -> Instance {
    let m = g.edge_count();
    Instance::new(g, sources, TraversalSpec::uniform(m, 1), vec![1; m], tau).unwrap()
}

fn gadget_params(r: &mut ChaCha8Rng) -> GadgetParams {
    match r.gen_range(0..4) {
        0 => GadgetParams::new(Measure::Ft, r.gen_range(1..=3), 2),
        1 => GadgetParams::new(Measure::St, r.gen_range(2..=3), 2),
        2 => GadgetParams::new(Measure::Mh, 3, 2),
        _ => GadgetParams::new(Measure::Mw, r.gen_range(1..=3), r.gen_range(2..=3)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converters_invert_each_other(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, &Shape { mu: (1, 3), ..Shape::default() });
        let rf = tmb_to_reachfast(&inst);
        prop_assert_eq!(&reachfast_to_tmb(&rf).unwrap(), &inst);
        let lab = random_labeling(&mut r, inst.edge_count(), inst.tau, 3);
        prop_assume!(lab.sets().iter().all(|s| !s.is_empty()));
        let rf2 = ReachFastInstance::new(inst.graph.clone(), inst.sources.clone(), inst.traversal.clone(), lab.clone(), inst.tau).unwrap();
        let back = reachfast_to_tmb(&rf2).unwrap();
        for (e, s) in lab.sets().iter().enumerate() {
            prop_assert_eq!(back.multiplicity[e], s.len() as u64);
        }
    }

    #[test]
    fn shift_replay_reaches_the_target(
        before in prop::collection::btree_set(1u64..12, 1..6),
        after in prop::collection::btree_set(1u64..12, 1..6),
    ) {
        prop_assume!(after.len() <= before.len());
        let b: Vec<u64> = before.into_iter().collect();
        let a: Vec<u64> = after.into_iter().collect();
        let shifts = shift_schedule(&b, &a);
        prop_assert_eq!(apply_shifts(&b, a.len(), &shifts), a);
    }

    /// The SAT oracle against exhaustive enumeration of single-label schedules.
    #[test]
    fn sat_oracle_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..=5);
        let g = random_graph(&mut r, n, 2, false);
        prop_assume!(g.edge_count() <= 6);
        let k = r.gen_range(1..=n.min(3));
        let inst = unit_instance(g, (0..k).collect(), r.gen_range(2..=4));
        let brute = all_labelings(&inst, false).iter().any(|l| is_feasible(&inst, l).unwrap());
        let sat = sat_feasible_unit(&inst);
        prop_assert_eq!(sat.is_some(), brute);
        if let Some(l) = sat {
            prop_assert!(is_feasible(&inst, &l).unwrap());
        }
    }

    /// A non-separating source path always yields a schedule.
    #[test]
    fn non_separating_path_gives_a_schedule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(3..=7);
        let g = random_graph(&mut r, n, 5, false);
        let m = g.edge_count();
        let inst = unit_instance(g, vec![0, 1], m as u64);
        if non_separating_path_exists(&inst, 0, 1) {
            prop_assert!(sat_feasible_unit(&inst).is_some());
        }
    }

    #[test]
    fn single_source_witnesses_hit_the_yes_value(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, 3, 3, (1, 3));
        let g = gen_single_source_gadget(&f, gadget_params(&mut r)).unwrap();
        let measure = match &g.kind {
            tmb::reductions::GadgetKind::SingleSource(p) => p.measure,
            _ => unreachable!(),
        };
        prop_assert!(g.yes_value < g.no_value_lower_bound);
        for a in assignments(f.variable_count()).filter(|a| f.is_satisfied_by(a)) {
            let lab = witness_labeling(&g, &a).unwrap();
            prop_assert!(lab.respects_multiplicity(&g.instance));
            prop_assert_eq!(objective(&g.instance, &lab, measure).unwrap(), g.yes_value);
        }
        let file = InstanceFile::from_gadget(&g);
        let text = io::serialize_instance_file(&file);
        prop_assert_eq!(io::serialize_instance_file(&io::parse_instance_file(&text).unwrap()), text);
        prop_assert_eq!(regenerate(&f, &g.kind).unwrap(), g);
    }

    #[test]
    fn two_source_paths_separate_exactly_on_falsifying_assignments(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, 3, 3, (3, 3));
        let nu = r.gen_range(2..=4);
        let g = gen_two_source_gadget(&f, nu).unwrap();
        prop_assert_eq!(g.instance.sources.len(), nu);
        for a in assignments(f.variable_count()) {
            let path = two_source_path(&g, &a).unwrap();
            let graph = &g.instance.graph;
            let used: HashSet<usize> = path
                .windows(2)
                .map(|w| graph.edge_between(w[0], w[1]).expect("path follows edges"))
                .collect();
            prop_assert_eq!(used.len() + 1, path.len());
            prop_assert_eq!(graph.is_connected_with(|e| !used.contains(&e)), f.is_satisfied_by(&a));
            if f.is_satisfied_by(&a) {
                prop_assert!(is_feasible(&g.instance, &witness_labeling(&g, &a).unwrap()).unwrap());
            }
        }
        let text = io::serialize_instance_file(&InstanceFile::from_gadget(&g));
        prop_assert_eq!(io::serialize_instance_file(&io::parse_instance_file(&text).unwrap()), text);
    }

    #[test]
    fn dimacs_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_formula(&mut r, 5, 6, (1, 4));
        prop_assert_eq!(io::parse_cnf(&f.to_dimacs_string()).unwrap(), f);
    }
}

#[test]
fn contradictory_three_clauses_are_rejected() {
    let f = CnfFormula::from_dimacs(2, &[&[1, -1, 2]]).unwrap();
    assert!(gen_two_source_gadget(&f, 2).is_err());
    let short = CnfFormula::from_dimacs(2, &[&[1, 2]]).unwrap();
    assert!(gen_two_source_gadget(&short, 2).is_err());
    assert!(gen_two_source_gadget(&CnfFormula::from_dimacs(1, &[&[1, 1, 1]]).unwrap(), 1).is_err());
}

#[test]
fn gadget_parameters_are_checked() {
    let f = CnfFormula::from_dimacs(1, &[&[1]]).unwrap();
    for (m, a, b) in [
        (Measure::Ft, 0, 2),
        (Measure::St, 1, 2),
        (Measure::Mh, 2, 2),
        (Measure::Mh, 4, 2),
        (Measure::Mw, 1, 1),
        (Measure::Ea, 3, 2),
    ] {
        assert!(
            gen_single_source_gadget(&f, GadgetParams::new(m, a, b)).is_err(),
            "{m} a={a} b={b}"
        );
    }
}
