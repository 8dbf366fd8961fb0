//! Single-source gadgets for FT, ST, MH and MW.
//!
//! Per variable `x` the source `s` reaches `in` through a positive branch and
//! a negative branch whose cheap departures are far apart in time. The
//! multiplicity-one edge `in`–`out` can serve only one branch; the clause
//! vertices hang below `out` with cheap departures matching the branch of
//! the literal. Every time not listed has weight τ, so such a traversal can
//! only end a path.

use std::collections::BTreeMap;

use super::{Assignment, Builder, CnfFormula, GadgetInstance, GadgetKind, GadgetParams, Role};
use crate::distances::Measure;
use crate::error::{Result, TmbError};
use crate::graph::{Labeling, Time};

/// Builds the gadget for `formula` with the given measure and stretch
/// parameters.
pub fn gen_single_source_gadget(
    formula: &CnfFormula,
    params: GadgetParams,
) -> Result<GadgetInstance> {
    params.validate()?;
    if let Some(j) = formula.clauses().iter().position(Vec::is_empty) {
        return Err(TmbError::InvalidParams(format!("clause {j} is empty")));
    }
    let (a, b) = (params.a, params.b);
    let p = formula.variable_count();
    let mut g = Builder::default();
    let s = g.vertex("s", Role::Source);

    let mut outs = Vec::with_capacity(p);
    let mut variable_edges = Vec::with_capacity(p);
    for i in 1..=p {
        let vin;
        match params.measure {
            Measure::Mh => {
                let mut prev = s;
                let mut chain = Vec::new();
                for k in 1..a {
                    chain.push(g.vertex(format!("x{i}_{k}"), Role::VariableTrue));
                }
                let nx = g.vertex(format!("nx{i}"), Role::VariableFalse);
                vin = g.vertex(format!("in{i}"), Role::VariableIn);
                for (k, &c) in chain.iter().enumerate() {
                    g.edge(prev, c, &[(k as Time + 1, 1)], false);
                    prev = c;
                }
                g.edge(prev, vin, &[(a, 1)], false);
                g.edge(s, nx, &[(a, 1)], false);
                g.edge(nx, vin, &[(a + 1, 1)], false);
            }
            _ => {
                let x = g.vertex(format!("x{i}"), Role::VariableTrue);
                let nx = g.vertex(format!("nx{i}"), Role::VariableFalse);
                vin = g.vertex(format!("in{i}"), Role::VariableIn);
                let (sx, snx, xin, nxin) = match params.measure {
                    Measure::Ft => ((1, 1), (a + 1, 1), (2, 1), (a + 2, 1)),
                    Measure::St => ((1, a), (a + 1, 1), (a + 1, 1), (a + 2, 1)),
                    Measure::Mw => ((1, 1), (b * a + 1, 1), (2, 1), (b * a + 2, 1)),
                    _ => unreachable!("validated"),
                };
                g.edge(s, x, &[sx], false);
                g.edge(s, nx, &[snx], false);
                g.edge(x, vin, &[xin], false);
                g.edge(nx, vin, &[nxin], false);
            }
        }
        let vout = g.vertex(format!("out{i}"), Role::VariableOut);
        let (t_true, t_false) = in_out_times(params);
        variable_edges.push(g.edge(vin, vout, &[(t_true, 1), (t_false, 1)], true));
        outs.push(vout);
    }

    let clauses: Vec<_> = (1..=formula.clauses().len())
        .map(|j| g.vertex(format!("c{j}"), Role::Clause))
        .collect();

    // (variable, clause) -> polarities occurring
    let mut incidences: BTreeMap<(usize, usize), Vec<bool>> = BTreeMap::new();
    for (j, c) in formula.clauses().iter().enumerate() {
        for l in c {
            let pol = incidences.entry((l.var, j)).or_default();
            if !pol.contains(&l.positive) {
                pol.push(l.positive);
            }
        }
    }
    for (&(var, j), pols) in &incidences {
        let (out, vc) = (outs[var], clauses[j]);
        let (i, cj) = (var + 1, j + 1);
        match params.measure {
            Measure::Ft | Measure::St => {
                let ov: Vec<(Time, Time)> = pols
                    .iter()
                    .map(|&pos| match (params.measure, pos) {
                        (Measure::Ft, true) => (4, 1),
                        (Measure::Ft, false) => (a + 4, 1),
                        (_, true) => (a + 3, 1),
                        (_, false) => (a + 4, a),
                    })
                    .collect();
                g.edge(out, vc, &ov, false);
            }
            Measure::Mh => {
                for &pos in pols {
                    if pos {
                        let w = g.vertex(format!("w{i}_{cj}"), Role::Subdivision);
                        g.edge(out, w, &[(a + 2, 1)], false);
                        g.edge(w, vc, &[(a + 3, 1)], false);
                    } else {
                        let mut prev = out;
                        for k in 1..a {
                            let w = g.vertex(format!("nw{i}_{cj}_{k}"), Role::Subdivision);
                            g.edge(prev, w, &[(a + 2 + k, 1)], false);
                            prev = w;
                        }
                        g.edge(prev, vc, &[(2 * a + 2, 1)], false);
                    }
                }
            }
            Measure::Mw => {
                for &pos in pols {
                    let (name, t) = if pos {
                        (format!("w{i}_{cj}"), a + 4)
                    } else {
                        (format!("nw{i}_{cj}"), b * a + a + 4)
                    };
                    let w = g.vertex(name, Role::Subdivision);
                    g.edge(out, w, &[(t, 1)], false);
                    g.edge(w, vc, &[(t + 1, 1)], false);
                }
            }
            Measure::Ea | Measure::Ld => unreachable!("validated"),
        }
    }

    let (instance, names, roles) = g.finish_sparse(vec![s])?;
    let (yes, no) = match params.measure {
        Measure::Ft => (4, a + 4),
        Measure::St => (a + 3, 2 * a + 2),
        Measure::Mh => (a + 3, 2 * a + 1),
        Measure::Mw => (a, a * (b + 1)),
        Measure::Ea | Measure::Ld => unreachable!("validated"),
    };
    Ok(GadgetInstance {
        instance,
        kind: GadgetKind::SingleSource(params),
        formula: formula.clone(),
        yes_value: Some(yes),
        no_value_lower_bound: Some(no),
        roles,
        names,
        variable_edges,
        layout: None,
    })
}

/// Cheap departure times on `in`–`out` for the true and the false branch.
fn in_out_times(params: GadgetParams) -> (Time, Time) {
    let (a, b) = (params.a, params.b);
    match params.measure {
        Measure::Ft => (3, a + 3),
        Measure::St => (a + 2, a + 3),
        Measure::Mh => (a + 1, a + 2),
        Measure::Mw => (3, b * a + 3),
        Measure::Ea | Measure::Ld => unreachable!("validated"),
    }
}

/// The labeling encoding `assignment`: each `in`–`out` edge gets the cheap
/// time of the chosen branch, every other edge gets all of `1..=τ`.
pub fn gadget_labeling_from_assignment(
    gadget: &GadgetInstance,
    assignment: &Assignment,
) -> Result<Labeling> {
    let GadgetKind::SingleSource(params) = gadget.kind else {
        return Err(TmbError::InvalidParams("not a single-source gadget".into()));
    };
    gadget.formula.check_assignment(assignment)?;
    let tau = gadget.instance.tau;
    let mut sets: Vec<Vec<Time>> = vec![(1..=tau).collect(); gadget.instance.edge_count()];
    let (t_true, t_false) = in_out_times(params);
    for (i, &e) in gadget.variable_edges.iter().enumerate() {
        sets[e] = vec![if assignment.values[i] {
            t_true
        } else {
            t_false
        }];
    }
    Ok(Labeling::new(sets))
}
