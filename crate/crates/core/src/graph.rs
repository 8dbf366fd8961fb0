//! Static graphs, traversal functions, instances, labelings and temporal paths.
//!
//! Edges are undirected and may be crossed from either endpoint at any of
//! their labels. Times are positive integers in `1..=tau`; traversal weights
//! are nonnegative, so an arrival may lie beyond the horizon.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Result, TmbError};

pub type Vertex = usize;
pub type EdgeId = usize;
pub type Time = u64;

/// Simple undirected loopless graph with dense, stable edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticGraph {
    vertex_count: usize,
    edges: Vec<(Vertex, Vertex)>,
    incident: Vec<Vec<EdgeId>>,
}

impl StaticGraph {
    /// Endpoint pairs are stored with the smaller id first.
    pub fn new(vertex_count: usize, edges: Vec<(Vertex, Vertex)>) -> Result<Self> {
        let mut incident = vec![Vec::new(); vertex_count];
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(TmbError::InvalidGraph(format!(
                    "edge {id} = {{{u}, {v}}} has an endpoint outside 0..{vertex_count}"
                )));
            }
            if u == v {
                return Err(TmbError::InvalidGraph(format!(
                    "edge {id} is a self-loop on {u}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(TmbError::InvalidGraph(format!(
                    "edge {id} duplicates {{{}, {}}}",
                    key.0, key.1
                )));
            }
            incident[u].push(id);
            incident[v].push(id);
            normalized.push(key);
        }
        Ok(Self {
            vertex_count,
            edges: normalized,
            incident,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    /// The endpoint of `e` that is not `v`. `v` must be incident to `e`.
    pub fn other_end(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        debug_assert!(a == v || b == v);
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.incident[v]
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.incident
            .get(u)?
            .iter()
            .copied()
            .find(|&e| self.other_end(e, u) == v)
    }

    /// Connectivity of the graph restricted to the edges for which `keep` holds.
    pub fn is_connected_with(&self, keep: impl Fn(EdgeId) -> bool) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &e in &self.incident[u] {
                if !keep(e) {
                    continue;
                }
                let w = self.other_end(e, u);
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_with(|_| true)
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edges.len() + 1 == self.vertex_count && self.is_connected()
    }
}

/// Sparse traversal function: a default weight per edge plus per-time overrides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalSpec {
    defaults: Vec<Time>,
    overrides: Vec<BTreeMap<Time, Time>>,
}

impl TraversalSpec {
    pub fn new(defaults: Vec<Time>, overrides: Vec<BTreeMap<Time, Time>>) -> Result<Self> {
        if defaults.len() != overrides.len() {
            return Err(TmbError::InvalidInstance(format!(
                "{} default weights but {} override tables",
                defaults.len(),
                overrides.len()
            )));
        }
        Ok(Self {
            defaults,
            overrides,
        })
    }

    /// Every edge has the same weight at every time.
    pub fn uniform(edge_count: usize, weight: Time) -> Self {
        Self {
            defaults: vec![weight; edge_count],
            overrides: vec![BTreeMap::new(); edge_count],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.defaults.len()
    }

    pub fn weight(&self, e: EdgeId, t: Time) -> Time {
        self.overrides[e]
            .get(&t)
            .copied()
            .unwrap_or(self.defaults[e])
    }

    pub fn default_weight(&self, e: EdgeId) -> Time {
        self.defaults[e]
    }

    pub fn overrides(&self, e: EdgeId) -> &BTreeMap<Time, Time> {
        &self.overrides[e]
    }

    pub fn set_default(&mut self, e: EdgeId, w: Time) {
        self.defaults[e] = w;
    }

    pub fn set_override(&mut self, e: EdgeId, t: Time, w: Time) {
        self.overrides[e].insert(t, w);
    }

    /// Appends an edge with the given default weight and no overrides.
    pub fn push_edge(&mut self, default: Time) -> EdgeId {
        self.defaults.push(default);
        self.overrides.push(BTreeMap::new());
        self.defaults.len() - 1
    }

    /// First time `>= from` (and `<= tau`) on `e` that is not overridden.
    pub fn next_default_time(&self, e: EdgeId, from: Time, tau: Time) -> Option<Time> {
        let mut t = from.max(1);
        let ov = &self.overrides[e];
        while t <= tau {
            if !ov.contains_key(&t) {
                return Some(t);
            }
            t += 1;
        }
        None
    }
}

/// A Δ-TMB instance `(G, S, tr, µ)` with an explicit horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: StaticGraph,
    pub sources: Vec<Vertex>,
    pub traversal: TraversalSpec,
    pub multiplicity: Vec<u64>,
    pub tau: Time,
}

impl Instance {
    pub fn new(
        graph: StaticGraph,
        sources: Vec<Vertex>,
        traversal: TraversalSpec,
        multiplicity: Vec<u64>,
        tau: Time,
    ) -> Result<Self> {
        let mut sources = sources;
        sources.sort_unstable();
        sources.dedup();
        let inst = Self {
            graph,
            sources,
            traversal,
            multiplicity,
            tau,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.graph.edge_count();
        let n = self.graph.vertex_count();
        if self.tau == 0 {
            return Err(TmbError::InvalidInstance("tau must be positive".into()));
        }
        if self.sources.is_empty() {
            return Err(TmbError::InvalidInstance("source set is empty".into()));
        }
        if let Some(&s) = self.sources.iter().find(|&&s| s >= n) {
            return Err(TmbError::InvalidInstance(format!(
                "source {s} is not a vertex"
            )));
        }
        if self.sources.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TmbError::InvalidInstance(
                "sources must be sorted and distinct".into(),
            ));
        }
        if self.traversal.edge_count() != m {
            return Err(TmbError::InvalidInstance(format!(
                "traversal covers {} edges, graph has {m}",
                self.traversal.edge_count()
            )));
        }
        if self.multiplicity.len() != m {
            return Err(TmbError::InvalidInstance(format!(
                "multiplicity covers {} edges, graph has {m}",
                self.multiplicity.len()
            )));
        }
        for e in 0..m {
            let mu = self.multiplicity[e];
            if mu == 0 || mu > self.tau {
                return Err(TmbError::InvalidInstance(format!(
                    "multiplicity {mu} of edge {e} is outside 1..={}",
                    self.tau
                )));
            }
            if let Some((&t, _)) = self
                .traversal
                .overrides(e)
                .iter()
                .find(|(&t, _)| t == 0 || t > self.tau)
            {
                return Err(TmbError::InvalidInstance(format!(
                    "override time {t} on edge {e} is outside 1..={}",
                    self.tau
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn weight(&self, e: EdgeId, t: Time) -> Time {
        self.traversal.weight(e, t)
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(TmbError::UnknownVertex(v))
        }
    }
}

/// A Δ-ReachFast instance: a temporal graph whose labels may be shifted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachFastInstance {
    pub graph: StaticGraph,
    pub sources: Vec<Vertex>,
    pub traversal: TraversalSpec,
    pub labels: Labeling,
    pub tau: Time,
}

impl ReachFastInstance {
    /// Every edge must carry at least one label, all within `1..=tau`.
    pub fn new(
        graph: StaticGraph,
        sources: Vec<Vertex>,
        traversal: TraversalSpec,
        labels: Labeling,
        tau: Time,
    ) -> Result<Self> {
        let mut sources = sources;
        sources.sort_unstable();
        sources.dedup();
        if sources.iter().any(|&s| s >= graph.vertex_count()) {
            return Err(TmbError::InvalidInstance("source out of range".into()));
        }
        if traversal.edge_count() != graph.edge_count() {
            return Err(TmbError::InvalidInstance("traversal size mismatch".into()));
        }
        labels.check_shape(graph.edge_count(), tau)?;
        if let Some(e) = (0..labels.edge_count()).find(|&e| labels.get(e).is_empty()) {
            return Err(TmbError::InvalidLabeling(format!(
                "edge {e} has no label to shift"
            )));
        }
        Ok(Self {
            graph,
            sources,
            traversal,
            labels,
            tau,
        })
    }
}

/// Per-edge sorted, duplicate-free label sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Labeling {
    sets: Vec<Vec<Time>>,
}

impl Labeling {
    pub fn new(mut sets: Vec<Vec<Time>>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        Self { sets }
    }

    pub fn empty(edge_count: usize) -> Self {
        Self {
            sets: vec![Vec::new(); edge_count],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, e: EdgeId) -> &[Time] {
        &self.sets[e]
    }

    pub fn sets(&self) -> &[Vec<Time>] {
        &self.sets
    }

    pub fn contains(&self, e: EdgeId, t: Time) -> bool {
        self.sets[e].binary_search(&t).is_ok()
    }

    pub fn insert(&mut self, e: EdgeId, t: Time) {
        if let Err(pos) = self.sets[e].binary_search(&t) {
            self.sets[e].insert(pos, t);
        }
    }

    pub fn total_labels(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    /// Edge count matches and every label lies in `1..=tau`.
    pub fn check_shape(&self, edge_count: usize, tau: Time) -> Result<()> {
        if self.sets.len() != edge_count {
            return Err(TmbError::InvalidLabeling(format!(
                "labeling covers {} edges, graph has {edge_count}",
                self.sets.len()
            )));
        }
        for (e, s) in self.sets.iter().enumerate() {
            if let Some(&t) = s.iter().find(|&&t| t == 0 || t > tau) {
                return Err(TmbError::InvalidLabeling(format!(
                    "label {t} on edge {e} is outside 1..={tau}"
                )));
            }
        }
        Ok(())
    }

    pub fn respects_multiplicity(&self, instance: &Instance) -> bool {
        self.sets.len() == instance.edge_count()
            && self
                .sets
                .iter()
                .zip(&instance.multiplicity)
                .all(|(s, &mu)| s.len() as u64 <= mu)
    }

    /// Shape check plus `|λ(e)| <= µ(e)`, reported as a typed error.
    pub fn check_against(&self, instance: &Instance) -> Result<()> {
        self.check_shape(instance.edge_count(), instance.tau)?;
        for (e, s) in self.sets.iter().enumerate() {
            if s.len() as u64 > instance.multiplicity[e] {
                return Err(TmbError::MultiplicityViolation {
                    edge: e,
                    labels: s.len(),
                    multiplicity: instance.multiplicity[e],
                });
            }
        }
        Ok(())
    }
}

/// Which temporal edges exist: an explicit labeling, or every time in `1..=tau`.
#[derive(Debug, Clone, Copy)]
pub enum Schedule<'a> {
    Labeled(&'a Labeling),
    Full { tau: Time },
}

/// The full temporal graph of an instance. Nothing is materialized.
pub fn full_temporal_graph(instance: &Instance) -> Schedule<'static> {
    Schedule::Full { tau: instance.tau }
}

impl<'a> Schedule<'a> {
    pub fn contains(&self, e: EdgeId, t: Time) -> bool {
        match self {
            Schedule::Labeled(l) => l.contains(e, t),
            Schedule::Full { tau } => t >= 1 && t <= *tau,
        }
    }

    /// Every available time on `e` that is `>= from`, ascending.
    pub fn times_from(&self, e: EdgeId, from: Time) -> Vec<Time> {
        match self {
            Schedule::Labeled(l) => {
                let s = l.get(e);
                let start = s.partition_point(|&t| t < from);
                s[start..].to_vec()
            }
            Schedule::Full { tau } => (from.max(1)..=*tau).collect(),
        }
    }

    /// Departure times on `e` at or after `from` that can matter to a
    /// minimizing search. On the full graph, all non-overridden times share
    /// the default weight, so only the first one is kept, together with every
    /// override time.
    pub fn candidates_from(&self, traversal: &TraversalSpec, e: EdgeId, from: Time) -> Vec<Time> {
        match self {
            Schedule::Labeled(_) => self.times_from(e, from),
            Schedule::Full { tau } => {
                let from = from.max(1);
                if from > *tau {
                    return Vec::new();
                }
                let mut out: Vec<Time> = traversal
                    .overrides(e)
                    .range(from..=*tau)
                    .map(|(&t, _)| t)
                    .collect();
                if let Some(t) = traversal.next_default_time(e, from, *tau) {
                    let pos = out.partition_point(|&x| x < t);
                    out.insert(pos, t);
                }
                out
            }
        }
    }

    /// Distinct departure times usable on the first edge of a path from `s`.
    pub fn source_departures(&self, graph: &StaticGraph, s: Vertex) -> Vec<Time> {
        match self {
            Schedule::Labeled(l) => {
                let mut ts: Vec<Time> = graph
                    .incident(s)
                    .iter()
                    .flat_map(|&e| l.get(e).iter().copied())
                    .collect();
                ts.sort_unstable();
                ts.dedup();
                ts
            }
            Schedule::Full { tau } => (1..=*tau).collect(),
        }
    }
}

/// One temporal edge of a path: traverse `edge` departing at `departure`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: EdgeId,
    pub departure: Time,
}

/// A temporal path starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TemporalPath {
    pub start: Vertex,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStats {
    pub departure: Time,
    pub arrival: Time,
    pub duration: Time,
    pub travel: Time,
    pub waiting: Time,
    pub hops: Time,
}

impl TemporalPath {
    pub fn new(start: Vertex, steps: Vec<Step>) -> Self {
        Self { start, steps }
    }

    /// Visited vertices, `start` first. Fails if consecutive edges do not chain.
    pub fn vertices(&self, graph: &StaticGraph) -> Result<Vec<Vertex>> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = self.start;
        out.push(cur);
        for (i, step) in self.steps.iter().enumerate() {
            if step.edge >= graph.edge_count() {
                return Err(TmbError::InvalidPath(format!(
                    "step {i}: unknown edge {}",
                    step.edge
                )));
            }
            let (a, b) = graph.endpoints(step.edge);
            cur = if a == cur {
                b
            } else if b == cur {
                a
            } else {
                return Err(TmbError::InvalidPath(format!(
                    "step {i}: edge {} is not incident to {cur}",
                    step.edge
                )));
            };
            out.push(cur);
        }
        Ok(out)
    }

    pub fn end(&self, graph: &StaticGraph) -> Result<Vertex> {
        Ok(*self.vertices(graph)?.last().expect("nonempty"))
    }
}

/// Departure, arrival, duration, travel, waiting and hop count of a path.
pub fn path_stats(path: &TemporalPath, traversal: &TraversalSpec) -> Result<PathStats> {
    let first = path
        .steps
        .first()
        .ok_or_else(|| TmbError::InvalidPath("path has no steps".into()))?;
    let mut travel: Time = 0;
    let mut waiting: Time = 0;
    let mut ready = first.departure;
    for (i, step) in path.steps.iter().enumerate() {
        if step.edge >= traversal.edge_count() {
            return Err(TmbError::InvalidPath(format!(
                "step {i}: unknown edge {}",
                step.edge
            )));
        }
        if step.departure < ready {
            return Err(TmbError::InvalidPath(format!(
                "step {i} departs at {} before arrival {ready}",
                step.departure
            )));
        }
        waiting += step.departure - ready;
        let w = traversal.weight(step.edge, step.departure);
        travel += w;
        ready = step.departure + w;
    }
    Ok(PathStats {
        departure: first.departure,
        arrival: ready,
        duration: ready - first.departure,
        travel,
        waiting,
        hops: path.steps.len() as Time,
    })
}

/// Simple static path, every departure scheduled, and time-respecting.
pub fn validate_path(path: &TemporalPath, schedule: &Schedule<'_>, instance: &Instance) -> bool {
    if path.steps.is_empty() {
        return false;
    }
    let Ok(vs) = path.vertices(&instance.graph) else {
        return false;
    };
    let mut seen = vec![false; instance.vertex_count()];
    for &v in &vs {
        if seen[v] {
            return false;
        }
        seen[v] = true;
    }
    if !path
        .steps
        .iter()
        .all(|s| schedule.contains(s.edge, s.departure))
    {
        return false;
    }
    path_stats(path, &instance.traversal).is_ok()
}

/// Every source temporally reaches every other vertex under `labeling`.
pub fn is_feasible(instance: &Instance, labeling: &Labeling) -> Result<bool> {
    labeling.check_against(instance)?;
    let schedule = Schedule::Labeled(labeling);
    Ok(instance.sources.iter().all(|&s| {
        crate::distances::earliest_arrival_tree(instance, &schedule, s, 0)
            .arrival
            .iter()
            .all(Option::is_some)
    }))
}
