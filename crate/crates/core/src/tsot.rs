//! Temporal spanning out-trees.

use crate::distances::{earliest_arrival_tree, sssp, Measure};
use crate::error::{Result, TmbError};
use crate::graph::{EdgeId, Instance, Labeling, Schedule, Time, Vertex};

/// A spanning tree with one label per edge, from which the root temporally
/// reaches every vertex along tree paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tsot {
    root: Vertex,
    /// In-edge of every non-root vertex with its label.
    in_edge: Vec<Option<(EdgeId, Time)>>,
}

impl Tsot {
    /// Builds and checks a tree from per-vertex in-edges.
    pub fn from_in_edges(
        instance: &Instance,
        root: Vertex,
        in_edge: Vec<Option<(EdgeId, Time)>>,
    ) -> Result<Self> {
        let t = Self { root, in_edge };
        t.check(instance)?;
        Ok(t)
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn in_edge(&self, v: Vertex) -> Option<(EdgeId, Time)> {
        self.in_edge[v]
    }

    /// Tree edges with their labels, ordered by edge id.
    pub fn edges(&self) -> Vec<(EdgeId, Time)> {
        let mut out: Vec<_> = self.in_edge.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    /// The tree as a labeling of the whole graph; non-tree edges are empty.
    pub fn labeling(&self, edge_count: usize) -> Labeling {
        let mut lab = Labeling::empty(edge_count);
        for (e, t) in self.edges() {
            lab.insert(e, t);
        }
        lab
    }

    /// Spanning tree, one label per edge, and every tree path time-respecting.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        let n = instance.vertex_count();
        let bad = |m: String| Err(TmbError::Validation(m));
        if self.in_edge.len() != n || self.root >= n || self.in_edge[self.root].is_some() {
            return bad("in-edge table does not match the graph".into());
        }
        let mut seen_edges = std::collections::HashSet::new();
        for v in 0..n {
            if v == self.root {
                continue;
            }
            let Some((e, _)) = self.in_edge[v] else {
                return bad(format!("vertex {v} is not spanned"));
            };
            if e >= instance.edge_count() || !seen_edges.insert(e) {
                return bad(format!("edge {e} is repeated or unknown"));
            }
            let (a, b) = instance.graph.endpoints(e);
            if a != v && b != v {
                return bad(format!("in-edge {e} is not incident to {v}"));
            }
        }
        for v in 0..n {
            if self.arrival_at(instance, v).is_none() {
                return bad(format!(
                    "vertex {v} is not temporally reached along the tree"
                ));
            }
        }
        Ok(())
    }

    /// Arrival time at `v` along the tree path (0 at the root), `None` if the
    /// tree path is cyclic or not time-respecting.
    pub fn arrival_at(&self, instance: &Instance, v: Vertex) -> Option<Time> {
        let mut chain = Vec::new();
        let mut cur = v;
        while cur != self.root {
            let (e, t) = self.in_edge[cur]?;
            chain.push((e, t));
            if chain.len() > self.in_edge.len() {
                return None;
            }
            cur = instance.graph.other_end(e, cur);
        }
        let mut arrival = 0;
        for &(e, t) in chain.iter().rev() {
            if t < arrival {
                return None;
            }
            arrival = t + instance.weight(e, t);
        }
        Some(arrival)
    }
}

/// A tree realizing every earliest-arrival distance from `root` in the full
/// temporal graph.
pub fn build_ea_tsot(instance: &Instance, root: Vertex) -> Result<Tsot> {
    instance.check_vertex(root)?;
    let full = Schedule::Full { tau: instance.tau };
    let tree = earliest_arrival_tree(instance, &full, root, 0);
    let mut in_edge = vec![None; instance.vertex_count()];
    for v in 0..instance.vertex_count() {
        if v == root {
            continue;
        }
        let step = tree.pred[v].ok_or(TmbError::Unreachable {
            from: root,
            target: v,
        })?;
        in_edge[v] = Some((step.edge, step.departure));
    }
    Tsot::from_in_edges(instance, root, in_edge)
}

/// A tree whose latest departure to every vertex is at least the minimum
/// latest departure from `root` under `schedule`.
///
/// Vertices are admitted by nondecreasing latest departure (ties by id). The
/// latest-departure path to each admitted vertex is merged edge by edge: a
/// new vertex gets the path edge; a vertex already in the tree keeps its
/// in-edge unless the path edge arrives strictly earlier.
pub fn build_ld_tsot(instance: &Instance, schedule: &Schedule<'_>, root: Vertex) -> Result<Tsot> {
    let n = instance.vertex_count();
    let ld = sssp(instance, schedule, root, Measure::Ld)?;
    let mut order = Vec::with_capacity(n);
    for (v, r) in ld.iter().enumerate() {
        if v == root {
            continue;
        }
        let d = r.value.ok_or(TmbError::Unreachable {
            from: root,
            target: v,
        })?;
        order.push((d, v));
    }
    order.sort_unstable();

    let mut in_edge: Vec<Option<(EdgeId, Time)>> = vec![None; n];
    let arrival_of = |e: EdgeId, t: Time| t + instance.weight(e, t);
    for &(_, u) in &order {
        if in_edge[u].is_some() {
            continue;
        }
        let path = ld[u]
            .witness
            .as_ref()
            .expect("reachable vertex has a witness");
        let mut w = root;
        for step in &path.steps {
            let next = instance.graph.other_end(step.edge, w);
            let arr = arrival_of(step.edge, step.departure);
            match in_edge[next] {
                None => in_edge[next] = Some((step.edge, step.departure)),
                Some((f, tf)) if arr < arrival_of(f, tf) => {
                    in_edge[next] = Some((step.edge, step.departure));
                    debug_assert!(!is_ancestor(instance, &in_edge, root, next, w));
                }
                Some(_) => {}
            }
            w = next;
        }
    }
    Tsot::from_in_edges(instance, root, in_edge)
}

/// Whether `anc` lies on the tree path from `root` to `v`.
fn is_ancestor(
    instance: &Instance,
    in_edge: &[Option<(EdgeId, Time)>],
    root: Vertex,
    anc: Vertex,
    v: Vertex,
) -> bool {
    let mut cur = v;
    let mut hops = 0;
    while cur != root {
        if cur == anc {
            return true;
        }
        let Some((e, _)) = in_edge[cur] else {
            return false;
        };
        cur = instance.graph.other_end(e, cur);
        hops += 1;
        if hops > in_edge.len() {
            return true;
        }
    }
    anc == root
}
