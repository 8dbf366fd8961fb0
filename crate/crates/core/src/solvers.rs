//! Exact solvers for the tractable regimes, the duration/waiting
//! approximation, and an exhaustive oracle.

use std::collections::BTreeMap;

use crate::distances::{ft_mw_bounds, sssp, Bounds, DistanceResult, Measure};
use crate::error::{Result, TmbError};
use crate::graph::{
    EdgeId, Instance, Labeling, Schedule, StaticGraph, Time, TraversalSpec, Vertex,
};
use crate::tsot::{build_ea_tsot, build_ld_tsot, Tsot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Approximate,
    Infeasible,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Approximate => "approximate",
            Status::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub labeling: Labeling,
    pub measure: Measure,
    /// Worst-case value; `None` exactly when the status is `Infeasible`.
    pub objective: Option<Time>,
    /// Distances for every source and every other vertex.
    pub per_source_distances: BTreeMap<(Vertex, Vertex), DistanceResult>,
    pub status: Status,
    /// Full-graph bounds backing an approximate answer.
    pub certificate: Option<Bounds>,
}

/// Caps on the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub max_edges: usize,
    pub max_tau: Time,
    pub max_labelings: u128,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        Self {
            max_edges: 16,
            max_tau: 16,
            max_labelings: 2_000_000,
        }
    }
}

fn evaluate(
    instance: &Instance,
    labeling: Labeling,
    measure: Measure,
    status: Status,
) -> Result<SolveResult> {
    labeling.check_against(instance)?;
    let schedule = Schedule::Labeled(&labeling);
    let mut per_source_distances = BTreeMap::new();
    let mut worst: Option<Time> = None;
    let mut feasible = true;
    for &s in &instance.sources {
        for (v, d) in sssp(instance, &schedule, s, measure)?
            .into_iter()
            .enumerate()
        {
            if v == s {
                continue;
            }
            match d.value {
                Some(x) => worst = Some(worst.map_or(x, |w| measure.worse_of(w, x))),
                None => feasible = false,
            }
            per_source_distances.insert((s, v), d);
        }
    }
    let (objective, status) = if feasible {
        (Some(worst.unwrap_or(0)), status)
    } else {
        (None, Status::Infeasible)
    };
    Ok(SolveResult {
        labeling,
        measure,
        objective,
        per_source_distances,
        status,
        certificate: None,
    })
}

fn single_tsot(instance: &Instance, s: Vertex, measure: Measure) -> Result<Tsot> {
    match measure {
        Measure::Ea => build_ea_tsot(instance, s),
        Measure::Ld => build_ld_tsot(instance, &Schedule::Full { tau: instance.tau }, s),
        other => Err(TmbError::UnsupportedMeasure(other.to_string())),
    }
}

fn require_ea_or_ld(measure: Measure) -> Result<()> {
    match measure {
        Measure::Ea | Measure::Ld => Ok(()),
        other => Err(TmbError::UnsupportedMeasure(other.to_string())),
    }
}

fn require_min_multiplicity(instance: &Instance, required: u64) -> Result<()> {
    for (edge, &multiplicity) in instance.multiplicity.iter().enumerate() {
        if multiplicity < required {
            return Err(TmbError::MultiplicityTooSmall {
                edge,
                multiplicity,
                required,
            });
        }
    }
    Ok(())
}

/// The tractable case an exact solve was dispatched to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SingleSource,
    FullMultiplicity,
    Tree,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::SingleSource => "single-source",
            Regime::FullMultiplicity => "multiplicity-at-least-sources",
            Regime::Tree => "tree",
        }
    }
}

/// The first exact regime that applies to `instance`, if any.
pub fn detect_regime(instance: &Instance, measure: Measure) -> Result<Regime> {
    if !matches!(measure, Measure::Ea | Measure::Ld) {
        return Err(TmbError::NoTractableRegime(format!(
            "{measure} is hard already for one source"
        )));
    }
    let k = instance.sources.len() as u64;
    let min_mu = instance
        .multiplicity
        .iter()
        .copied()
        .min()
        .unwrap_or(u64::MAX);
    if k == 1 {
        Ok(Regime::SingleSource)
    } else if min_mu >= k {
        Ok(Regime::FullMultiplicity)
    } else if instance.graph.is_tree() && min_mu >= 2 {
        Ok(Regime::Tree)
    } else {
        Err(TmbError::NoTractableRegime(format!(
            "{k} sources, minimum multiplicity {min_mu}, graph {} a tree",
            if instance.graph.is_tree() {
                "is"
            } else {
                "is not"
            }
        )))
    }
}

/// Dispatches to the exact solver of the detected regime.
pub fn solve_exact(instance: &Instance, measure: Measure) -> Result<(Regime, SolveResult)> {
    let regime = detect_regime(instance, measure)?;
    let out = match regime {
        Regime::SingleSource => solve_single_source(instance, measure)?,
        Regime::FullMultiplicity => solve_multi_full_mu(instance, measure)?,
        Regime::Tree => solve_tree(instance, measure)?,
    };
    Ok((regime, out))
}

/// Single-source EA or LD: the matching spanning out-tree of the full
/// temporal graph.
pub fn solve_single_source(instance: &Instance, measure: Measure) -> Result<SolveResult> {
    require_ea_or_ld(measure)?;
    if instance.sources.len() != 1 {
        return Err(TmbError::WrongSourceCount(instance.sources.len()));
    }
    let tree = single_tsot(instance, instance.sources[0], measure)?;
    evaluate(
        instance,
        tree.labeling(instance.edge_count()),
        measure,
        Status::Optimal,
    )
}

/// EA or LD with `µ(e) >= |S|` everywhere: per-edge union of one tree per
/// source.
pub fn solve_multi_full_mu(instance: &Instance, measure: Measure) -> Result<SolveResult> {
    require_ea_or_ld(measure)?;
    require_min_multiplicity(instance, instance.sources.len() as u64)?;
    let mut labeling = Labeling::empty(instance.edge_count());
    for &s in &instance.sources {
        for (e, t) in single_tsot(instance, s, measure)?.edges() {
            labeling.insert(e, t);
        }
    }
    evaluate(instance, labeling, measure, Status::Optimal)
}

/// EA or LD on a tree with `µ >= 2`. Each edge keeps, for each of its two
/// directions, the largest label that any single-source tree puts on it in
/// that direction.
pub fn solve_tree(instance: &Instance, measure: Measure) -> Result<SolveResult> {
    require_ea_or_ld(measure)?;
    if !instance.graph.is_tree() {
        return Err(TmbError::NotATree);
    }
    require_min_multiplicity(instance, 2)?;
    let m = instance.edge_count();
    // slot 0: traversed from the smaller endpoint; slot 1: from the larger
    let mut best = vec![[0 as Time; 2]; m];
    for &s in &instance.sources {
        let tree = single_tsot(instance, s, measure)?;
        for v in 0..instance.vertex_count() {
            let Some((e, t)) = tree.in_edge(v) else {
                continue;
            };
            let (a, _) = instance.graph.endpoints(e);
            let slot = usize::from(v == a);
            best[e][slot] = best[e][slot].max(t);
        }
    }
    let labeling = Labeling::new(
        best.iter()
            .map(|slots| slots.iter().copied().filter(|&t| t > 0).collect())
            .collect(),
    );
    evaluate(instance, labeling, measure, Status::Optimal)
}

/// Edges lying on a path between two sources whose multiplicity is below 2.
/// Advisory only: [`solve_tree`] requires `µ >= 2` on every edge.
pub fn tree_multiplicity_advisory(instance: &Instance) -> Result<Vec<EdgeId>> {
    if !instance.graph.is_tree() {
        return Err(TmbError::NotATree);
    }
    let g = &instance.graph;
    let mut flagged = vec![false; instance.edge_count()];
    for (i, &s) in instance.sources.iter().enumerate() {
        let parent = tree_parents(g, s);
        for &other in &instance.sources[i + 1..] {
            let mut cur = other;
            while let Some(e) = parent[cur] {
                flagged[e] = true;
                cur = g.other_end(e, cur);
            }
        }
    }
    Ok((0..instance.edge_count())
        .filter(|&e| flagged[e] && instance.multiplicity[e] < 2)
        .collect())
}

fn tree_parents(g: &StaticGraph, root: Vertex) -> Vec<Option<EdgeId>> {
    let mut parent = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(u) = stack.pop() {
        for &e in g.incident(u) {
            let v = g.other_end(e, u);
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some(e);
                stack.push(v);
            }
        }
    }
    parent
}

/// Single-source FT or MW: any spanning out-tree, reported with the
/// full-graph bounds `FT_min <= OPT <= objective <= FT_max` (resp. MW).
pub fn approx_ft_mw(instance: &Instance, measure: Measure) -> Result<SolveResult> {
    if !matches!(measure, Measure::Ft | Measure::Mw) {
        return Err(TmbError::UnsupportedMeasure(measure.to_string()));
    }
    if instance.sources.len() != 1 {
        return Err(TmbError::WrongSourceCount(instance.sources.len()));
    }
    let s = instance.sources[0];
    let bounds = ft_mw_bounds(instance, s)?;
    let tree = build_ld_tsot(instance, &Schedule::Full { tau: instance.tau }, s)?;
    let mut out = evaluate(
        instance,
        tree.labeling(instance.edge_count()),
        measure,
        Status::Approximate,
    )?;
    out.certificate = Some(bounds);
    Ok(out)
}

/// Number of labelings the exhaustive search visits.
pub fn search_space_size(instance: &Instance) -> u128 {
    instance.multiplicity.iter().fold(1u128, |acc, &mu| {
        acc.saturating_mul(binomial(instance.tau, mu.min(instance.tau)))
    })
}

fn binomial(n: Time, k: Time) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
    }
    r
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn subsets_of_size(n: Time, k: usize) -> Vec<Vec<Time>> {
    fn go(start: Time, n: Time, k: usize, cur: &mut Vec<Time>, out: &mut Vec<Vec<Time>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = (k - cur.len()) as Time;
        let mut t = start;
        while t + need - 1 <= n {
            cur.push(t);
            go(t + 1, n, k, cur, out);
            cur.pop();
            t += 1;
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Cross product of per-edge choices, last edge varying fastest. The visitor
/// returns `false` to stop early.
pub fn for_each_product(choices: &[Vec<Vec<Time>>], mut visit: impl FnMut(&Labeling) -> bool) {
    if choices.iter().any(Vec::is_empty) {
        return;
    }
    let m = choices.len();
    let mut idx = vec![0usize; m];
    let mut lab = Labeling::new(choices.iter().map(|c| c[0].clone()).collect());
    loop {
        if !visit(&lab) {
            return;
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        let mut sets = lab.sets().to_vec();
        for (e, set) in sets.iter_mut().enumerate().skip(pos) {
            *set = choices[e][idx[e]].clone();
        }
        lab = Labeling::new(sets);
    }
}

/// Worst-case value of `measure` under `labeling`, `None` if infeasible.
/// Multiplicity is not checked.
pub fn labeling_value(instance: &Instance, labeling: &Labeling, measure: Measure) -> Option<Time> {
    let schedule = Schedule::Labeled(labeling);
    let mut worst: Option<Time> = None;
    for &s in &instance.sources {
        let d = sssp(instance, &schedule, s, measure).ok()?;
        for (v, r) in d.iter().enumerate() {
            if v == s {
                continue;
            }
            let x = r.value?;
            worst = Some(worst.map_or(x, |w| measure.worse_of(w, x)));
        }
    }
    Some(worst.unwrap_or(0))
}

/// Exhaustive optimum over labelings that use exactly `min(µ(e), τ)` labels
/// per edge. Ties keep the lexicographically smallest labeling.
pub fn brute_force(
    instance: &Instance,
    measure: Measure,
    limits: BruteForceLimits,
) -> Result<SolveResult> {
    let size = search_space_size(instance);
    if instance.edge_count() > limits.max_edges
        || instance.tau > limits.max_tau
        || size > limits.max_labelings
    {
        return Err(TmbError::SearchSpaceTooLarge(size.to_string()));
    }
    let choices: Vec<Vec<Vec<Time>>> = instance
        .multiplicity
        .iter()
        .map(|&mu| subsets_of_size(instance.tau, mu.min(instance.tau) as usize))
        .collect();
    let mut best: Option<(Time, Labeling)> = None;
    for_each_product(&choices, |lab| {
        if let Some(v) = labeling_value(instance, lab, measure) {
            if best
                .as_ref()
                .map_or(true, |(b, _)| measure.better_objective(v, *b))
            {
                best = Some((v, lab.clone()));
            }
        }
        true
    });
    match best {
        Some((_, lab)) => evaluate(instance, lab, measure, Status::Optimal),
        None => Ok(SolveResult {
            labeling: Labeling::empty(instance.edge_count()),
            measure,
            objective: None,
            per_source_distances: BTreeMap::new(),
            status: Status::Infeasible,
            certificate: None,
        }),
    }
}

/// Adds a vertex joined to every source by an edge of zero traversal time
/// and multiplicity τ, and makes it the only source. A vertex is then
/// reached from the new source iff some original source reaches it.
pub fn add_super_source(instance: &Instance) -> Result<Instance> {
    let n = instance.vertex_count();
    let star = n;
    let mut edges = instance.graph.edges().to_vec();
    let mut traversal: TraversalSpec = instance.traversal.clone();
    let mut multiplicity = instance.multiplicity.clone();
    for &s in &instance.sources {
        edges.push((s, star));
        traversal.push_edge(0);
        multiplicity.push(instance.tau);
    }
    let graph = StaticGraph::new(n + 1, edges)?;
    Instance::new(graph, vec![star], traversal, multiplicity, instance.tau)
}
