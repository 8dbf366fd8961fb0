//! The six temporal distances, single-source vectors, worst-case objectives
//! and the duration/waiting bounds of the full temporal graph.
//!
//! Earliest arrival is a Dijkstra over arrival times. Latest departure and
//! fastest time sweep the departure time at the source and reuse the
//! earliest-arrival search. Shortest traveling and minimum hop run a
//! cost-ordered search over `(vertex, arrival)` states with arrival-time
//! dominance. Minimum waiting is not monotone under cycle removal, so the
//! walk relaxation is only accepted when its witness is a simple path;
//! otherwise an exhaustive simple-path search settles the vertex.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TmbError};
use crate::graph::{
    path_stats, Instance, Labeling, PathStats, Schedule, Step, TemporalPath, Time, Vertex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    /// Earliest arrival.
    Ea,
    /// Latest departure.
    Ld,
    /// Fastest time (minimum duration).
    Ft,
    /// Shortest traveling time.
    St,
    /// Minimum hop count.
    Mh,
    /// Minimum waiting time.
    Mw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Minimize,
    Maximize,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Ea,
        Measure::Ld,
        Measure::Ft,
        Measure::St,
        Measure::Mh,
        Measure::Mw,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Measure::Ea => "ea",
            Measure::Ld => "ld",
            Measure::Ft => "ft",
            Measure::St => "st",
            Measure::Mh => "mh",
            Measure::Mw => "mw",
        }
    }

    /// Over paths between a pair. The worst case over vertices uses the
    /// opposite direction (max for minimized measures, min for LD).
    pub fn polarity(self) -> Polarity {
        match self {
            Measure::Ld => Polarity::Maximize,
            _ => Polarity::Minimize,
        }
    }

    pub fn statistic(self, stats: &PathStats) -> Time {
        match self {
            Measure::Ea => stats.arrival,
            Measure::Ld => stats.departure,
            Measure::Ft => stats.duration,
            Measure::St => stats.travel,
            Measure::Mh => stats.hops,
            Measure::Mw => stats.waiting,
        }
    }

    /// Whether `a` is a strictly better path value than `b`.
    pub fn better(self, a: Time, b: Time) -> bool {
        match self.polarity() {
            Polarity::Minimize => a < b,
            Polarity::Maximize => a > b,
        }
    }

    /// Whether objective value `a` is strictly better than `b`.
    pub fn better_objective(self, a: Time, b: Time) -> bool {
        self.better(a, b)
    }

    /// Worst of two per-vertex distances.
    pub fn worse_of(self, a: Time, b: Time) -> Time {
        match self.polarity() {
            Polarity::Minimize => a.max(b),
            Polarity::Maximize => a.min(b),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag().to_uppercase())
    }
}

impl FromStr for Measure {
    type Err = TmbError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ea" => Ok(Measure::Ea),
            "ld" => Ok(Measure::Ld),
            "ft" => Ok(Measure::Ft),
            "st" => Ok(Measure::St),
            "mh" => Ok(Measure::Mh),
            "mw" => Ok(Measure::Mw),
            other => Err(TmbError::Validation(format!("unknown measure `{other}`"))),
        }
    }
}

/// Optimal value of a measure between two vertices, with a realizing path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: Option<Time>,
    pub witness: Option<TemporalPath>,
}

impl DistanceResult {
    pub fn unreachable() -> Self {
        Self {
            value: None,
            witness: None,
        }
    }

    fn found(value: Time, witness: TemporalPath) -> Self {
        Self {
            value: Some(value),
            witness: Some(witness),
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.value.is_some()
    }
}

/// Worst-vertex bounds over the full temporal graph from one source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub ft_min: Time,
    pub ft_max: Time,
    pub mw_min: Time,
    pub mw_max: Time,
}

/// Earliest-arrival search result with predecessor temporal edges.
#[derive(Debug, Clone)]
pub struct EaTree {
    pub source: Vertex,
    pub arrival: Vec<Option<Time>>,
    pub pred: Vec<Option<Step>>,
}

impl EaTree {
    /// Tree path from the source to `v`, if `v` was reached and `v != source`.
    pub fn path_to(&self, instance: &Instance, v: Vertex) -> Option<TemporalPath> {
        if v == self.source {
            return None;
        }
        self.arrival[v]?;
        let mut steps = Vec::new();
        let mut cur = v;
        while cur != self.source {
            let step = self.pred[cur]?;
            steps.push(step);
            cur = instance.graph.other_end(step.edge, cur);
        }
        steps.reverse();
        Some(TemporalPath::new(self.source, steps))
    }
}

/// Earliest arrival from `source`, whose first departure must be `>= ready`.
pub fn earliest_arrival_tree(
    instance: &Instance,
    schedule: &Schedule<'_>,
    source: Vertex,
    ready: Time,
) -> EaTree {
    let n = instance.vertex_count();
    let mut arrival: Vec<Option<Time>> = vec![None; n];
    let mut pred: Vec<Option<Step>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    arrival[source] = Some(ready);
    heap.push(Reverse((ready, source)));
    while let Some(Reverse((a, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &e in instance.graph.incident(u) {
            let v = instance.graph.other_end(e, u);
            if done[v] {
                continue;
            }
            for t in schedule.candidates_from(&instance.traversal, e, a) {
                let arr = t.saturating_add(instance.weight(e, t));
                if arrival[v].map_or(true, |cur| arr < cur) {
                    arrival[v] = Some(arr);
                    pred[v] = Some(Step {
                        edge: e,
                        departure: t,
                    });
                    heap.push(Reverse((arr, v)));
                }
            }
        }
    }
    EaTree {
        source,
        arrival,
        pred,
    }
}

/// `Δ(u, v)` under `schedule`, with a realizing temporal path.
pub fn distance(
    instance: &Instance,
    schedule: &Schedule<'_>,
    u: Vertex,
    v: Vertex,
    measure: Measure,
) -> Result<DistanceResult> {
    instance.check_vertex(u)?;
    instance.check_vertex(v)?;
    if u == v {
        return Err(TmbError::SameVertex(u));
    }
    let mut all = sssp(instance, schedule, u, measure)?;
    Ok(all.swap_remove(v))
}

/// `Δ(s, v)` for every vertex `v`; the entry for `s` itself is unreachable.
pub fn sssp(
    instance: &Instance,
    schedule: &Schedule<'_>,
    s: Vertex,
    measure: Measure,
) -> Result<Vec<DistanceResult>> {
    instance.check_vertex(s)?;
    let out = match measure {
        Measure::Ea => sssp_ea(instance, schedule, s),
        Measure::Ld => sssp_ld(instance, schedule, s),
        Measure::Ft => sssp_ft(instance, schedule, s),
        Measure::St => cost_search(instance, schedule, s, CostKind::Travel),
        Measure::Mh => cost_search(instance, schedule, s, CostKind::Hops),
        Measure::Mw => sssp_mw(instance, schedule, s),
    };
    debug_assert!(out.iter().all(|r| match (&r.value, &r.witness) {
        (Some(val), Some(p)) => {
            let st = path_stats(p, &instance.traversal).expect("witness is time-respecting");
            measure.statistic(&st) == *val
        }
        (None, None) => true,
        _ => false,
    }));
    Ok(out)
}

fn sssp_ea(instance: &Instance, schedule: &Schedule<'_>, s: Vertex) -> Vec<DistanceResult> {
    let tree = earliest_arrival_tree(instance, schedule, s, 0);
    (0..instance.vertex_count())
        .map(|v| match tree.path_to(instance, v) {
            Some(p) => DistanceResult::found(tree.arrival[v].expect("reached"), p),
            None => DistanceResult::unreachable(),
        })
        .collect()
}

fn sssp_ld(instance: &Instance, schedule: &Schedule<'_>, s: Vertex) -> Vec<DistanceResult> {
    let n = instance.vertex_count();
    let mut out = vec![DistanceResult::unreachable(); n];
    let mut pending = n - 1;
    for d in schedule
        .source_departures(&instance.graph, s)
        .into_iter()
        .rev()
    {
        if pending == 0 {
            break;
        }
        let tree = earliest_arrival_tree(instance, schedule, s, d);
        for v in 0..n {
            if v == s || out[v].is_reachable() {
                continue;
            }
            if let Some(p) = tree.path_to(instance, v) {
                let dep = p.steps[0].departure;
                out[v] = DistanceResult::found(dep, p);
                pending -= 1;
            }
        }
    }
    out
}

fn sssp_ft(instance: &Instance, schedule: &Schedule<'_>, s: Vertex) -> Vec<DistanceResult> {
    let n = instance.vertex_count();
    let mut out = vec![DistanceResult::unreachable(); n];
    for d in schedule.source_departures(&instance.graph, s) {
        let tree = earliest_arrival_tree(instance, schedule, s, d);
        for v in 0..n {
            if v == s {
                continue;
            }
            let Some(arr) = tree.arrival[v] else { continue };
            let bound = arr - d;
            if out[v].value.map_or(true, |cur| bound < cur) {
                let p = tree.path_to(instance, v).expect("reached");
                let dur = arr - p.steps[0].departure;
                out[v] = DistanceResult::found(dur, p);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CostKind {
    Travel,
    Hops,
}

#[derive(Debug, Clone, Copy)]
struct State {
    vertex: Vertex,
    cost: Time,
    parent: Option<usize>,
    step: Option<Step>,
}

fn chain(states: &[State], mut idx: usize) -> Vec<Step> {
    let mut steps = Vec::new();
    while let Some(step) = states[idx].step {
        steps.push(step);
        idx = states[idx].parent.expect("non-root state has a parent");
    }
    steps.reverse();
    steps
}

/// Minimum travel or hop count. States `(v, arrival)` are popped in
/// `(cost, arrival)` order; a state is dropped when an earlier-or-equal
/// arrival at `v` was already settled at no greater cost.
fn cost_search(
    instance: &Instance,
    schedule: &Schedule<'_>,
    s: Vertex,
    kind: CostKind,
) -> Vec<DistanceResult> {
    let n = instance.vertex_count();
    let mut states = vec![State {
        vertex: s,
        cost: 0,
        parent: None,
        step: None,
    }];
    let mut best_arrival: Vec<Option<Time>> = vec![None; n];
    let mut out = vec![DistanceResult::unreachable(); n];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0, 0, 0usize)));
    while let Some(Reverse((cost, arrival, idx))) = heap.pop() {
        let u = states[idx].vertex;
        if best_arrival[u].is_some_and(|b| arrival >= b) {
            continue;
        }
        if best_arrival[u].is_none() && u != s {
            out[u] = DistanceResult::found(cost, TemporalPath::new(s, chain(&states, idx)));
        }
        best_arrival[u] = Some(arrival);
        for &e in instance.graph.incident(u) {
            let v = instance.graph.other_end(e, u);
            for t in schedule.candidates_from(&instance.traversal, e, arrival) {
                let w = instance.weight(e, t);
                let arr = t.saturating_add(w);
                if best_arrival[v].is_some_and(|b| arr >= b) {
                    continue;
                }
                let c = cost
                    + match kind {
                        CostKind::Travel => w,
                        CostKind::Hops => 1,
                    };
                states.push(State {
                    vertex: v,
                    cost: c,
                    parent: Some(idx),
                    step: Some(Step {
                        edge: e,
                        departure: t,
                    }),
                });
                heap.push(Reverse((c, arr, states.len() - 1)));
            }
        }
    }
    out
}

/// Minimum waiting over walks, keyed by `(vertex, arrival)`; the first
/// departure is free. Vertices whose walk witness revisits a vertex are
/// recomputed over simple paths.
fn sssp_mw(instance: &Instance, schedule: &Schedule<'_>, s: Vertex) -> Vec<DistanceResult> {
    let n = instance.vertex_count();
    let mut states = vec![State {
        vertex: s,
        cost: 0,
        parent: None,
        step: None,
    }];
    let mut settled: HashSet<(Vertex, Time)> = HashSet::new();
    let mut first: Vec<Option<usize>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0, 0, 0usize)));
    while let Some(Reverse((cost, arrival, idx))) = heap.pop() {
        let u = states[idx].vertex;
        let is_root = idx == 0;
        if !is_root && !settled.insert((u, arrival)) {
            continue;
        }
        if !is_root && first[u].is_none() {
            first[u] = Some(idx);
        }
        for &e in instance.graph.incident(u) {
            let v = instance.graph.other_end(e, u);
            if v == s {
                continue;
            }
            let times = if is_root {
                schedule.times_from(e, 1)
            } else {
                schedule.candidates_from(&instance.traversal, e, arrival)
            };
            for t in times {
                let arr = t.saturating_add(instance.weight(e, t));
                if settled.contains(&(v, arr)) {
                    continue;
                }
                let c = if is_root { 0 } else { cost + (t - arrival) };
                states.push(State {
                    vertex: v,
                    cost: c,
                    parent: Some(idx),
                    step: Some(Step {
                        edge: e,
                        departure: t,
                    }),
                });
                heap.push(Reverse((c, arr, states.len() - 1)));
            }
        }
    }
    let mut out = vec![DistanceResult::unreachable(); n];
    for v in 0..n {
        let Some(idx) = first[v] else { continue };
        let path = TemporalPath::new(s, chain(&states, idx));
        let simple = path
            .vertices(&instance.graph)
            .map(|vs| {
                let mut seen = HashSet::new();
                vs.into_iter().all(|x| seen.insert(x))
            })
            .unwrap_or(false);
        out[v] = if simple {
            DistanceResult::found(states[idx].cost, path)
        } else {
            match min_waiting_simple(instance, schedule, s, v) {
                Some((w, p)) => DistanceResult::found(w, p),
                None => DistanceResult::unreachable(),
            }
        };
    }
    out
}

/// Exhaustive minimum waiting over simple temporal paths from `s` to `target`.
pub(crate) fn min_waiting_simple(
    instance: &Instance,
    schedule: &Schedule<'_>,
    s: Vertex,
    target: Vertex,
) -> Option<(Time, TemporalPath)> {
    struct Search<'a, 'b> {
        instance: &'a Instance,
        schedule: &'a Schedule<'b>,
        target: Vertex,
        on_path: Vec<bool>,
        best: Option<(Time, Vec<Step>)>,
    }

    // Frontier entries: arrival -> (least waiting, steps realizing it).
    type Frontier = BTreeMap<Time, (Time, Vec<Step>)>;

    impl Search<'_, '_> {
        fn extend(&mut self, u: Vertex, frontier: &Frontier, is_root: bool) {
            let least = frontier.values().map(|(w, _)| *w).min().unwrap_or(0);
            if self.best.as_ref().is_some_and(|(b, _)| least >= *b) {
                return;
            }
            for &e in self.instance.graph.incident(u) {
                let v = self.instance.graph.other_end(e, u);
                if self.on_path[v] {
                    continue;
                }
                let mut next: Frontier = BTreeMap::new();
                for (&a, (w, steps)) in frontier {
                    let times = if is_root {
                        self.schedule.times_from(e, 1)
                    } else {
                        self.schedule
                            .candidates_from(&self.instance.traversal, e, a)
                    };
                    for t in times {
                        let arr = t.saturating_add(self.instance.weight(e, t));
                        let nw = if is_root { 0 } else { w + (t - a) };
                        if next.get(&arr).map_or(true, |(cw, _)| nw < *cw) {
                            let mut st = steps.clone();
                            st.push(Step {
                                edge: e,
                                departure: t,
                            });
                            next.insert(arr, (nw, st));
                        }
                    }
                }
                if next.is_empty() {
                    continue;
                }
                if v == self.target {
                    for (w, st) in next.values() {
                        if self.best.as_ref().map_or(true, |(b, _)| w < b) {
                            self.best = Some((*w, st.clone()));
                        }
                    }
                    continue;
                }
                self.on_path[v] = true;
                self.extend(v, &next, false);
                self.on_path[v] = false;
            }
        }
    }

    let mut search = Search {
        instance,
        schedule,
        target,
        on_path: vec![false; instance.vertex_count()],
        best: None,
    };
    search.on_path[s] = true;
    let root: Frontier = BTreeMap::from([(0, (0, Vec::new()))]);
    search.extend(s, &root, true);
    search
        .best
        .map(|(w, steps)| (w, TemporalPath::new(s, steps)))
}

/// Worst-case value over all sources and vertices, or `None` if some source
/// misses some vertex.
pub fn objective(
    instance: &Instance,
    labeling: &Labeling,
    measure: Measure,
) -> Result<Option<Time>> {
    labeling.check_against(instance)?;
    let schedule = Schedule::Labeled(labeling);
    let mut worst: Option<Time> = None;
    for &s in &instance.sources {
        match worst_from(instance, &schedule, s, measure)? {
            None => return Ok(None),
            Some(w) => worst = Some(worst.map_or(w, |cur| measure.worse_of(cur, w))),
        }
    }
    Ok(worst)
}

/// Worst distance from `s` to any other vertex, `None` if one is unreachable.
/// A single-vertex graph has no other vertex; its worst case is reported as 0.
pub fn worst_from(
    instance: &Instance,
    schedule: &Schedule<'_>,
    s: Vertex,
    measure: Measure,
) -> Result<Option<Time>> {
    let dists = sssp(instance, schedule, s, measure)?;
    let mut worst: Option<Time> = None;
    for (v, d) in dists.iter().enumerate() {
        if v == s {
            continue;
        }
        let val = match d.value {
            Some(x) => x,
            None => return Ok(None),
        };
        worst = Some(worst.map_or(val, |cur| measure.worse_of(cur, val)));
    }
    Ok(Some(worst.unwrap_or(0)))
}

/// `FT_min`, `FT_max`, `MW_min`, `MW_max` from `s` on the full temporal graph.
/// The maxima range over simple temporal paths, enumerated exhaustively.
pub fn ft_mw_bounds(instance: &Instance, s: Vertex) -> Result<Bounds> {
    instance.check_vertex(s)?;
    let full = Schedule::Full { tau: instance.tau };
    let ft = sssp(instance, &full, s, Measure::Ft)?;
    let mw = sssp(instance, &full, s, Measure::Mw)?;
    let mut ft_min = 0;
    let mut mw_min = 0;
    for v in 0..instance.vertex_count() {
        if v == s {
            continue;
        }
        match (ft[v].value, mw[v].value) {
            (Some(f), Some(w)) => {
                ft_min = ft_min.max(f);
                mw_min = mw_min.max(w);
            }
            _ => return Err(TmbError::Unreachable { from: s, target: v }),
        }
    }
    let (ft_max, mw_max) = simple_path_maxima(instance, s);
    Ok(Bounds {
        ft_min,
        ft_max,
        mw_min,
        mw_max,
    })
}

/// Max duration and max waiting over all simple temporal paths from `s` in
/// the full temporal graph, each maximized over target vertices.
fn simple_path_maxima(instance: &Instance, s: Vertex) -> (Time, Time) {
    // arrival -> (earliest departure, largest waiting) among paths on this prefix
    type Frontier = BTreeMap<Time, (Time, Time)>;

    fn extend(
        instance: &Instance,
        u: Vertex,
        frontier: &Frontier,
        is_root: bool,
        on_path: &mut Vec<bool>,
        best: &mut (Time, Time),
    ) {
        let tau = instance.tau;
        for &e in instance.graph.incident(u) {
            let v = instance.graph.other_end(e, u);
            if on_path[v] {
                continue;
            }
            let mut next: Frontier = BTreeMap::new();
            for (&a, &(dep, wait)) in frontier {
                let from = if is_root { 1 } else { a.max(1) };
                for t in from..=tau {
                    let arr = t.saturating_add(instance.weight(e, t));
                    let (nd, nw) = if is_root {
                        (t, 0)
                    } else {
                        (dep, wait + (t - a))
                    };
                    let slot = next.entry(arr).or_insert((nd, nw));
                    slot.0 = slot.0.min(nd);
                    slot.1 = slot.1.max(nw);
                }
            }
            if next.is_empty() {
                continue;
            }
            for (&arr, &(dep, wait)) in &next {
                best.0 = best.0.max(arr - dep);
                best.1 = best.1.max(wait);
            }
            on_path[v] = true;
            extend(instance, v, &next, false, on_path, best);
            on_path[v] = false;
        }
    }

    let mut on_path = vec![false; instance.vertex_count()];
    on_path[s] = true;
    let mut best = (0, 0);
    let root: Frontier = BTreeMap::from([(0, (0, 0))]);
    extend(instance, s, &root, true, &mut on_path, &mut best);
    best
}
