//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's distance engine or solvers: paths are
//! enumerated explicitly, labelings are enumerated by hand, and multi-source
//! feasibility of unit-weight gadgets is decided by a SAT encoding.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use varisat::{CnfFormula, ExtendFormula, Lit, Solver};

use tmb::{Instance, Labeling, Measure, StaticGraph, Time, TraversalSpec, Vertex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub n: (usize, usize),
    pub extra_edges: usize,
    pub tree: bool,
    pub sources: (usize, usize),
    pub tau: (Time, Time),
    pub weight: (Time, Time),
    /// Probability that a given time carries an override.
    pub override_rate: f64,
    pub mu: (u64, u64),
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            n: (2, 6),
            extra_edges: 3,
            tree: false,
            sources: (1, 1),
            tau: (2, 5),
            weight: (0, 2),
            override_rate: 0.2,
            mu: (1, 2),
        }
    }
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra: usize, tree: bool) -> StaticGraph {
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((order[i], order[j]));
    }
    if !tree {
        for _ in 0..rng.gen_range(0..=extra) {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let key = (u.min(v), u.max(v));
            if u != v && !edges.iter().any(|&(a, b)| (a.min(b), a.max(b)) == key) {
                edges.push((u, v));
            }
        }
    }
    StaticGraph::new(n, edges).expect("generated graph is simple")
}

pub fn random_instance(rng: &mut ChaCha8Rng, shape: &Shape) -> Instance {
    let n = rng.gen_range(shape.n.0..=shape.n.1);
    let graph = random_graph(rng, n, shape.extra_edges, shape.tree);
    let m = graph.edge_count();
    let tau = rng.gen_range(shape.tau.0..=shape.tau.1);
    let mut tr = TraversalSpec::uniform(m, 0);
    for e in 0..m {
        tr.set_default(e, rng.gen_range(shape.weight.0..=shape.weight.1));
        for t in 1..=tau {
            if rng.gen_bool(shape.override_rate) {
                tr.set_override(e, t, rng.gen_range(shape.weight.0..=shape.weight.1));
            }
        }
    }
    let mut vs: Vec<Vertex> = (0..n).collect();
    vs.shuffle(rng);
    let k = rng.gen_range(shape.sources.0..=shape.sources.1.min(n));
    let sources = vs[..k].to_vec();
    let mu = (0..m)
        .map(|_| rng.gen_range(shape.mu.0..=shape.mu.1).min(tau))
        .collect();
    Instance::new(graph, sources, tr, mu, tau).expect("generated instance is valid")
}

pub fn random_labeling(rng: &mut ChaCha8Rng, m: usize, tau: Time, max_labels: usize) -> Labeling {
    Labeling::new(
        (0..m)
            .map(|_| {
                let k = rng.gen_range(0..=max_labels);
                (0..k).map(|_| rng.gen_range(1..=tau)).collect()
            })
            .collect(),
    )
}

pub fn full_labeling(instance: &Instance) -> Labeling {
    Labeling::new(vec![(1..=instance.tau).collect(); instance.edge_count()])
}

/// Statistics of one explicitly enumerated temporal path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Walked {
    pub departure: Time,
    pub arrival: Time,
    pub travel: Time,
    pub waiting: Time,
    pub hops: Time,
}

fn weight(instance: &Instance, e: usize, t: Time) -> Time {
    instance
        .traversal
        .overrides(e)
        .get(&t)
        .copied()
        .unwrap_or_else(|| instance.traversal.default_weight(e))
}

fn neighbours(instance: &Instance, u: Vertex) -> Vec<(usize, Vertex)> {
    instance
        .graph
        .edges()
        .iter()
        .enumerate()
        .filter_map(|(e, &(a, b))| match () {
            _ if a == u => Some((e, b)),
            _ if b == u => Some((e, a)),
            _ => None,
        })
        .collect()
}

/// Every time-respecting simple path from `u` to `v` under `labeling`.
pub fn all_paths(instance: &Instance, labeling: &Labeling, u: Vertex, v: Vertex) -> Vec<Walked> {
    let adj: Vec<Vec<(usize, Vertex)>> = (0..instance.vertex_count())
        .map(|x| neighbours(instance, x))
        .collect();
    let mut out = Vec::new();
    let mut on_path = vec![false; instance.vertex_count()];
    on_path[u] = true;
    struct Ctx<'a> {
        instance: &'a Instance,
        labeling: &'a Labeling,
        adj: &'a [Vec<(usize, Vertex)>],
        target: Vertex,
    }
    fn rec(
        ctx: &Ctx<'_>,
        at: Vertex,
        ready: Option<Time>,
        acc: Walked,
        on_path: &mut Vec<bool>,
        out: &mut Vec<Walked>,
    ) {
        for &(e, next) in &ctx.adj[at] {
            if on_path[next] {
                continue;
            }
            for &t in ctx.labeling.get(e) {
                if ready.is_some_and(|r| t < r) {
                    continue;
                }
                let w = weight(ctx.instance, e, t);
                let step = Walked {
                    departure: if ready.is_none() { t } else { acc.departure },
                    arrival: t + w,
                    travel: acc.travel + w,
                    waiting: acc.waiting + ready.map_or(0, |r| t - r),
                    hops: acc.hops + 1,
                };
                if next == ctx.target {
                    out.push(step);
                } else {
                    on_path[next] = true;
                    rec(ctx, next, Some(t + w), step, on_path, out);
                    on_path[next] = false;
                }
            }
        }
    }
    let ctx = Ctx {
        instance,
        labeling,
        adj: &adj,
        target: v,
    };
    let zero = Walked {
        departure: 0,
        arrival: 0,
        travel: 0,
        waiting: 0,
        hops: 0,
    };
    rec(&ctx, u, None, zero, &mut on_path, &mut out);
    out
}

/// Best value of `measure` over all enumerated paths, `None` if unreachable.
pub fn oracle_distance(
    instance: &Instance,
    labeling: &Labeling,
    u: Vertex,
    v: Vertex,
    measure: Measure,
) -> Option<Time> {
    let paths = all_paths(instance, labeling, u, v);
    let values = paths.iter().map(|p| match measure {
        Measure::Ea => p.arrival,
        Measure::Ld => p.departure,
        Measure::Ft => p.arrival - p.departure,
        Measure::St => p.travel,
        Measure::Mh => p.hops,
        Measure::Mw => p.waiting,
    });
    match measure {
        Measure::Ld => values.max(),
        _ => values.min(),
    }
}

/// Worst case over all (source, other vertex) pairs; `None` if infeasible.
pub fn oracle_objective(
    instance: &Instance,
    labeling: &Labeling,
    measure: Measure,
) -> Option<Time> {
    let mut worst: Option<Time> = None;
    for &s in &instance.sources {
        for v in 0..instance.vertex_count() {
            if v == s {
                continue;
            }
            let d = oracle_distance(instance, labeling, s, v, measure)?;
            worst = Some(match (worst, measure) {
                (None, _) => d,
                (Some(w), Measure::Ld) => w.min(d),
                (Some(w), _) => w.max(d),
            });
        }
    }
    Some(worst.unwrap_or(0))
}

pub fn oracle_feasible(instance: &Instance, labeling: &Labeling) -> bool {
    oracle_objective(instance, labeling, Measure::Ea).is_some()
}

/// Objective when each vertex only needs to be reached by some source:
/// EA takes the best source per vertex, LD likewise. Sources themselves count
/// as reached at time 1 (EA) or τ (LD).
pub fn relaxed_objective(
    instance: &Instance,
    labeling: &Labeling,
    measure: Measure,
) -> Option<Time> {
    assert!(matches!(measure, Measure::Ea | Measure::Ld));
    let mut worst = if measure == Measure::Ea {
        1
    } else {
        instance.tau
    };
    for v in 0..instance.vertex_count() {
        if instance.sources.contains(&v) {
            continue;
        }
        let per_source = instance
            .sources
            .iter()
            .filter_map(|&s| oracle_distance(instance, labeling, s, v, measure));
        let best = match measure {
            Measure::Ea => per_source.min()?,
            _ => per_source.max()?,
        };
        worst = match measure {
            Measure::Ea => worst.max(best),
            _ => worst.min(best),
        };
    }
    Some(worst)
}

fn subsets(n: Time, k: usize) -> Vec<Vec<Time>> {
    fn rec(start: Time, n: Time, k: usize, cur: &mut Vec<Time>, out: &mut Vec<Vec<Time>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..=n {
            cur.push(t);
            rec(t + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every labeling with exactly `min(µ(e), τ)` labels per edge, or with
/// between one and `µ(e)` labels when `up_to` is set.
pub fn all_labelings(instance: &Instance, up_to: bool) -> Vec<Labeling> {
    let per_edge: Vec<Vec<Vec<Time>>> = instance
        .multiplicity
        .iter()
        .map(|&mu| {
            let top = mu.min(instance.tau) as usize;
            let lo = if up_to { 1 } else { top };
            (lo..=top).flat_map(|k| subsets(instance.tau, k)).collect()
        })
        .collect();
    let mut out = vec![Vec::new()];
    for options in &per_edge {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for o in options {
                let mut p: Vec<Vec<Time>> = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(Labeling::new).collect()
}

pub fn better(measure: Measure, a: Time, b: Time) -> bool {
    if measure == Measure::Ld {
        a > b
    } else {
        a < b
    }
}

/// Optimum over `labelings` of `value`.
pub fn optimum(
    measure: Measure,
    labelings: &[Labeling],
    value: impl Fn(&Labeling) -> Option<Time>,
) -> Option<Time> {
    labelings
        .iter()
        .filter_map(value)
        .reduce(|a, b| if better(measure, b, a) { b } else { a })
}

/// Feasibility of a multiplicity-one, unit-weight instance by SAT.
///
/// A schedule is feasible iff every source has a spanning out-tree whose
/// labels strictly increase away from the root (earliest-arrival trees are
/// such trees). `parent[s][v][i]` picks the `i`-th incident edge of `v` as its
/// tree edge towards `s`; `before[(f, e)]` forces `label(f) < label(e)` in an
/// order encoding `at_least[e][t] <=> label(e) >= t + 1`. Only the relative
/// order of labels matters with unit steps, so labels live in
/// `1..=min(τ, m)`. Returns the decoded labeling when feasible.
pub fn sat_feasible_unit(instance: &Instance) -> Option<Labeling> {
    let (cnf, at_least) = unit_feasibility_cnf(instance);
    let mut solver = Solver::new();
    solver.add_formula(&cnf);
    if !solver.solve().expect("solver runs without proofs") {
        return None;
    }
    let model = solver.model().expect("satisfiable");
    let mut truth = vec![false; model.len() + 1];
    for lit in model {
        truth[lit.index()] = lit.is_positive();
    }
    Some(Labeling::new(
        at_least
            .iter()
            .map(|row| vec![row.iter().filter(|l| truth[l.index()]).count() as Time])
            .collect(),
    ))
}

/// The clauses behind [`sat_feasible_unit`] and the order-encoded labels.
pub fn unit_feasibility_cnf(instance: &Instance) -> (CnfFormula, Vec<Vec<Lit>>) {
    let m = instance.edge_count();
    let n = instance.vertex_count();
    for e in 0..m {
        assert_eq!(instance.multiplicity[e], 1, "unit multiplicity only");
        assert_eq!(instance.traversal.default_weight(e), 1, "unit weights only");
        assert!(instance.traversal.overrides(e).values().all(|&w| w == 1));
    }
    let horizon = instance.tau.min(m.max(1) as Time) as usize;
    let mut solver = CnfFormula::new();
    // at_least[e][t] for t in 0..horizon: label(e) >= t + 1; index 0 is true
    let at_least: Vec<Vec<Lit>> = (0..m)
        .map(|_| (0..horizon).map(|_| solver.new_lit()).collect())
        .collect();
    for row in &at_least {
        solver.add_clause(&[row[0]]);
        for t in 1..horizon {
            solver.add_clause(&[!row[t], row[t - 1]]);
        }
    }
    let adj: Vec<Vec<(usize, Vertex)>> = (0..n).map(|x| neighbours(instance, x)).collect();
    let mut before = std::collections::HashMap::new();
    let mut precedes = |solver: &mut CnfFormula, f: usize, e: usize| -> Lit {
        *before.entry((f, e)).or_insert_with(|| {
            let q = solver.new_lit();
            // label(f) >= t + 1  =>  label(e) >= t + 2
            for t in 0..horizon {
                let mut clause = vec![!q, !at_least[f][t]];
                if t + 1 < horizon {
                    clause.push(at_least[e][t + 1]);
                }
                solver.add_clause(&clause);
            }
            q
        })
    };
    for &s in &instance.sources {
        let parent: Vec<Vec<Lit>> = (0..n)
            .map(|v| adj[v].iter().map(|_| solver.new_lit()).collect())
            .collect();
        for v in 0..n {
            if v == s {
                continue;
            }
            solver.add_clause(&parent[v]);
            for (i, &(e, u)) in adj[v].iter().enumerate() {
                if u == s {
                    continue;
                }
                for (j, &(f, _)) in adj[u].iter().enumerate() {
                    if f == e {
                        solver.add_clause(&[!parent[v][i], !parent[u][j]]);
                        continue;
                    }
                    let q = precedes(&mut solver, f, e);
                    solver.add_clause(&[!parent[v][i], !parent[u][j], q]);
                }
            }
        }
    }
    (solver, at_least)
}

/// Whether some simple `a`-`b` path leaves the graph connected once its edges
/// are deleted. A path through an interior vertex of degree two isolates that
/// vertex, so such vertices are never entered.
pub fn non_separating_path_exists(instance: &Instance, a: Vertex, b: Vertex) -> bool {
    let n = instance.vertex_count();
    let adj: Vec<Vec<(usize, Vertex)>> = (0..n).map(|x| neighbours(instance, x)).collect();
    let mut on_path = vec![false; n];
    let mut removed = vec![false; instance.graph.edge_count()];
    on_path[a] = true;
    fn connected_without(instance: &Instance, removed: &[bool]) -> bool {
        let n = instance.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = n;
        for (e, &(u, v)) in instance.graph.edges().iter().enumerate() {
            if removed[e] {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        components == 1
    }
    fn rec(
        instance: &Instance,
        adj: &[Vec<(usize, Vertex)>],
        at: Vertex,
        target: Vertex,
        on_path: &mut [bool],
        removed: &mut [bool],
    ) -> bool {
        for &(e, next) in &adj[at] {
            if on_path[next] || (next != target && adj[next].len() <= 2) {
                continue;
            }
            removed[e] = true;
            let found = if next == target {
                connected_without(instance, removed)
            } else {
                on_path[next] = true;
                let f = rec(instance, adj, next, target, on_path, removed);
                on_path[next] = false;
                f
            };
            removed[e] = false;
            if found {
                return true;
            }
        }
        false
    }
    rec(instance, &adj, a, b, &mut on_path, &mut removed)
}
