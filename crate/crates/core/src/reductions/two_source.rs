//! Two-source gadget: feasible with one label per edge iff a 3-CNF formula
//! is satisfiable.
//!
//! The formula is duplicated. Every clause becomes a subdivided star whose
//! leaves are literal vertices. Each variable owns two chains threading
//! through the literal vertices of its occurrences (positive occurrences in
//! the F chain, negative ones in the T chain); consecutive variables are
//! joined through bridge triples, from `s1` to `s2`. A hub `z` hangs off every
//! non-clause vertex through a path of length three. An `s1`–`s2` path whose
//! removal keeps the graph connected exists iff the formula is satisfiable.

use std::collections::{BTreeSet, VecDeque};

use super::{Assignment, Builder, CnfFormula, GadgetInstance, GadgetKind, Role};
use crate::error::{Result, TmbError};
use crate::graph::{EdgeId, Labeling, Time, Vertex};

/// Vertex ids the witness construction needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSourceLayout {
    pub s1: Vertex,
    pub s2: Vertex,
    /// Compacted variable index to the original (0-based) variable.
    pub variable_map: Vec<usize>,
    /// Per duplicated variable, the vertex sequence through its T chain and
    /// its F chain (`x_1, literal, x_2, x_1, literal, x_2, …`).
    pub chains: Vec<[Vec<Vertex>; 2]>,
    /// Bridge triples `(in, mid, out)` between consecutive variables.
    pub bridges: Vec<[Vertex; 3]>,
    /// `s3, …, s_N` when more than two sources were requested.
    pub extension: Vec<Vertex>,
    /// Number of vertices of the gadget without the extension.
    pub main_vertex_count: usize,
}

const T: usize = 0;
const F: usize = 1;

/// Builds the gadget for a 3-CNF formula with `source_count >= 2` sources.
/// Variables that occur in no clause are dropped.
pub fn gen_two_source_gadget(formula: &CnfFormula, source_count: usize) -> Result<GadgetInstance> {
    formula.check_three_sat()?;
    if source_count < 2 {
        return Err(TmbError::InvalidParams(format!(
            "need at least two sources, got {source_count}"
        )));
    }
    let used: BTreeSet<usize> = formula.clauses().iter().flatten().map(|l| l.var).collect();
    let variable_map: Vec<usize> = used.iter().copied().collect();
    let compact = |v: usize| variable_map.binary_search(&v).expect("used variable");
    let p = variable_map.len();
    let q = formula.clauses().len();
    // duplicated clauses over variables 0..2p
    let clauses: Vec<Vec<(usize, bool)>> = (0..2 * q)
        .map(|j| {
            let shift = if j < q { 0 } else { p };
            formula.clauses()[j % q]
                .iter()
                .map(|l| (compact(l.var) + shift, l.positive))
                .collect()
        })
        .collect();

    let mut g = Builder::default();
    let s1 = g.vertex("s1", Role::Source);
    let s2 = g.vertex("s2", Role::Source);
    let mut literal_vertex = vec![[0; 3]; 2 * q];
    for (j, lits) in literal_vertex.iter_mut().enumerate() {
        let c = g.vertex(format!("c{}", j + 1), Role::Clause);
        for (k, slot) in lits.iter_mut().enumerate() {
            let z = g.vertex(format!("z{}_{}", j + 1, k + 1), Role::Subdivision);
            let l = g.vertex(format!("l{}_{}", j + 1, k + 1), Role::Literal);
            g.edge(c, z, &[], false);
            g.edge(z, l, &[], false);
            *slot = l;
        }
    }

    let mut non_clause = vec![s1, s2];
    let mut chains: Vec<[Vec<Vertex>; 2]> = vec![[Vec::new(), Vec::new()]; 2 * p];
    for (i, chain) in chains.iter_mut().enumerate() {
        let mut counts = [0usize; 2];
        for (j, lits) in clauses.iter().enumerate() {
            for (k, &(var, positive)) in lits.iter().enumerate() {
                if var != i {
                    continue;
                }
                let side = if positive { F } else { T };
                counts[side] += 1;
                let r = counts[side];
                let tag = if side == F { 'F' } else { 'T' };
                let role = if side == F {
                    Role::VariableFalse
                } else {
                    Role::VariableTrue
                };
                let x1 = g.vertex(format!("x{}{tag}{r}_1", i + 1), role);
                let x2 = g.vertex(format!("x{}{tag}{r}_2", i + 1), role);
                let l = literal_vertex[j][k];
                g.edge(l, x1, &[], false);
                g.edge(l, x2, &[], false);
                if let Some(&prev) = chain[side].last() {
                    g.edge(prev, x1, &[], false);
                }
                chain[side].extend([x1, l, x2]);
                non_clause.extend([x1, x2]);
            }
        }
    }

    let bridges: Vec<[Vertex; 3]> = (1..2 * p)
        .map(|i| {
            let b_in = g.vertex(format!("b{i}_in"), Role::Bridge);
            let b_mid = g.vertex(format!("b{i}_mid"), Role::Bridge);
            let b_out = g.vertex(format!("b{i}_out"), Role::Bridge);
            g.edge(b_in, b_mid, &[], false);
            g.edge(b_mid, b_out, &[], false);
            non_clause.extend([b_in, b_mid, b_out]);
            [b_in, b_mid, b_out]
        })
        .collect();

    for (i, chain) in chains.iter().enumerate() {
        let entry = if i == 0 { s1 } else { bridges[i - 1][2] };
        let exit = if i + 1 == 2 * p { s2 } else { bridges[i][0] };
        for side in [F, T] {
            if let (Some(&first), Some(&last)) = (chain[side].first(), chain[side].last()) {
                g.edge(entry, first, &[], false);
                g.edge(last, exit, &[], false);
            }
        }
        if chain[F].is_empty() || chain[T].is_empty() {
            g.edge(entry, exit, &[], false);
        }
    }

    let z = g.vertex("z", Role::Z);
    for (idx, &u) in non_clause.iter().enumerate() {
        let h1 = g.vertex(format!("h{}_1", idx + 1), Role::Subdivision);
        let h2 = g.vertex(format!("h{}_2", idx + 1), Role::Subdivision);
        g.edge(u, h1, &[], false);
        g.edge(h1, h2, &[], false);
        g.edge(h2, z, &[], false);
    }
    let main_vertex_count = g.names.len();

    let mut sources = vec![s1, s2];
    let mut extension = Vec::new();
    if source_count > 2 {
        let n_ext = source_count.max(6);
        for j in 3..=n_ext {
            let role = if j <= source_count {
                Role::Source
            } else {
                Role::Auxiliary
            };
            let v = g.vertex(format!("s{j}"), role);
            extension.push(v);
            if j <= source_count {
                sources.push(v);
            }
        }
        // extension[k] is s_{k+3}
        let s = |j: usize| extension[j - 3];
        g.edge(s2, s(3), &[], false);
        g.edge(s2, s(4), &[], false);
        g.edge(s(3), s(4), &[], false);
        for j in 5..=n_ext {
            g.edge(s(j), s(3), &[], false);
            g.edge(s(j), s(4), &[], false);
        }
        g.edge(s(n_ext - 1), s(n_ext), &[], false);
    }

    let n_total = g.names.len();
    let tau = (2 * n_total + 2 * extension.len().max(1) + 4) as Time;
    let (instance, names, roles) = g.finish_unit(sources, tau)?;
    Ok(GadgetInstance {
        instance,
        kind: GadgetKind::TwoSource {
            sources: source_count,
        },
        formula: formula.clone(),
        yes_value: None,
        no_value_lower_bound: None,
        roles,
        names,
        variable_edges: Vec::new(),
        layout: Some(TwoSourceLayout {
            s1,
            s2,
            variable_map,
            chains,
            bridges,
            extension,
            main_vertex_count,
        }),
    })
}

fn layout(gadget: &GadgetInstance) -> Result<&TwoSourceLayout> {
    gadget
        .layout
        .as_ref()
        .ok_or_else(|| TmbError::InvalidParams("not a two-source gadget".into()))
}

/// The `s1`–`s2` path encoding `assignment` (over the original variables):
/// a true variable is crossed along its T chain, a false one along its F
/// chain, and an empty chosen chain is skipped by the bypass edge.
pub fn two_source_path(gadget: &GadgetInstance, assignment: &Assignment) -> Result<Vec<Vertex>> {
    let lay = layout(gadget)?;
    if assignment.len() != gadget.formula.variable_count() {
        return Err(TmbError::AssignmentSize {
            expected: gadget.formula.variable_count(),
            got: assignment.len(),
        });
    }
    let p = lay.variable_map.len();
    let mut path = vec![lay.s1];
    for (i, chain) in lay.chains.iter().enumerate() {
        let value = assignment.values[lay.variable_map[i % p]];
        path.extend(&chain[if value { T } else { F }]);
        if i + 1 < 2 * p {
            path.extend(lay.bridges[i]);
        }
    }
    path.push(lay.s2);
    Ok(path)
}

fn path_edges(gadget: &GadgetInstance, path: &[Vertex]) -> Vec<EdgeId> {
    path.windows(2)
        .map(|w| {
            gadget
                .instance
                .graph
                .edge_between(w[0], w[1])
                .expect("consecutive path vertices are adjacent")
        })
        .collect()
}

/// Labels the assignment's path `1, 2, …, t` from `s1`, then a breadth-first
/// tree from `s2` over the remaining edges with `t + 1 + depth`. With more
/// than two sources every main label is postponed to make room for the
/// extension clique, whose labels sit before and after the main block.
pub fn two_source_witness_labeling(
    gadget: &GadgetInstance,
    assignment: &Assignment,
) -> Result<Labeling> {
    gadget.formula.check_assignment(assignment)?;
    let lay = layout(gadget)?;
    let inst = &gadget.instance;
    let g = &inst.graph;
    let path = two_source_path(gadget, assignment)?;
    let on_path: Vec<EdgeId> = path_edges(gadget, &path);

    let n_ext = if lay.extension.is_empty() {
        0
    } else {
        lay.extension.len() + 2
    };
    let offset = if n_ext == 0 { 0 } else { n_ext as Time - 1 };
    let mut lab = Labeling::empty(inst.edge_count());
    for (k, &e) in on_path.iter().enumerate() {
        lab.insert(e, offset + k as Time + 1);
    }
    let t = offset + on_path.len() as Time;

    let main = lay.main_vertex_count;
    let mut depth: Vec<Option<Time>> = vec![None; inst.vertex_count()];
    depth[lay.s2] = Some(0);
    let mut queue = VecDeque::from([lay.s2]);
    let mut max_label = t;
    while let Some(u) = queue.pop_front() {
        let d = depth[u].expect("queued vertices have a depth");
        for &e in g.incident(u) {
            let v = g.other_end(e, u);
            if v >= main || depth[v].is_some() || on_path.contains(&e) {
                continue;
            }
            depth[v] = Some(d + 1);
            lab.insert(e, t + 1 + d);
            max_label = max_label.max(t + 1 + d);
            queue.push_back(v);
        }
    }
    if let Some(v) = (0..main).find(|&v| depth[v].is_none()) {
        return Err(TmbError::Validation(format!(
            "removing the assignment path cuts off vertex {}",
            gadget.names[v]
        )));
    }

    if n_ext > 0 {
        let n = n_ext as Time;
        let s = |j: usize| lay.extension[j - 3];
        let mut put = |u: Vertex, v: Vertex, t: Time| {
            lab.insert(g.edge_between(u, v).expect("extension edge"), t);
        };
        for j in 5..=n_ext - 2 {
            put(s(3), s(j), j as Time - 4);
        }
        put(s(n_ext - 1), s(n_ext), n - 4);
        put(s(3), s(n_ext - 1), n - 3);
        put(s(3), s(4), n - 2);
        put(lay.s2, s(3), n - 1);
        let omega = max_label + 1;
        put(lay.s2, s(4), omega);
        put(s(4), s(n_ext), omega + 1);
        put(s(3), s(n_ext), omega + 2);
        for j in 5..n_ext {
            put(s(4), s(j), omega + 1 + (n_ext - j) as Time);
        }
    }
    Ok(lab)
}
