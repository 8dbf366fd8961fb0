//! Canonical JSON documents for instances and labelings, DIMACS CNF input
//! and DOT export.
//!
//! Serialization is canonical: object keys in alphabetical order, edges with
//! the smaller endpoint first, sources and override times ascending, labels
//! ascending, two-space indentation and a trailing newline. Hence
//! `serialize(parse(serialize(x))) == serialize(x)` byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distances::Measure;
use crate::error::{Result, TmbError};
use crate::graph::{
    Instance, Labeling, ReachFastInstance, StaticGraph, Time, TraversalSpec, Vertex,
};
use crate::reductions::{CnfFormula, GadgetInstance, GadgetKind, GadgetParams, Literal, Role};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraversalDocument {
    pub default: Time,
    /// `[time, weight]` pairs.
    pub overrides: Vec<[Time; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GadgetDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Time>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Time>,
    /// `single-source` or `two-source`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_value_lower_bound: Option<Time>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable_map: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yes_value: Option<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub edges: Vec<[Vertex; 2]>,
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gadget: Option<GadgetDocument>,
    pub multiplicity: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<Vec<String>>,
    pub sources: Vec<Vertex>,
    pub tau: Time,
    pub traversal: Vec<TraversalDocument>,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Time>,
    pub solver: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingDocument {
    pub format_version: u32,
    pub labels: Vec<Vec<Time>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Gadget metadata carried by an instance document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetMeta {
    pub kind: GadgetKind,
    pub yes_value: Option<Time>,
    pub no_value_lower_bound: Option<Time>,
    pub variable_map: Option<Vec<usize>>,
}

/// An instance together with the optional presentation metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub names: Option<Vec<String>>,
    pub roles: Option<Vec<Role>>,
    pub gadget: Option<GadgetMeta>,
}

impl InstanceFile {
    pub fn bare(instance: Instance) -> Self {
        Self {
            instance,
            names: None,
            roles: None,
            gadget: None,
        }
    }

    pub fn from_gadget(g: &GadgetInstance) -> Self {
        Self {
            instance: g.instance.clone(),
            names: Some(g.names.clone()),
            roles: Some(g.roles.clone()),
            gadget: Some(GadgetMeta {
                kind: g.kind.clone(),
                yes_value: g.yes_value,
                no_value_lower_bound: g.no_value_lower_bound,
                variable_map: g.layout.as_ref().map(|l| l.variable_map.clone()),
            }),
        }
    }

    /// Display name of `v`: its name if present, else its index.
    pub fn name(&self, v: Vertex) -> String {
        match &self.names {
            Some(n) => n[v].clone(),
            None => v.to_string(),
        }
    }

    /// Resolves a vertex given by name or by index.
    pub fn resolve(&self, token: &str) -> Result<Vertex> {
        if let Some(names) = &self.names {
            if let Some(v) = names.iter().position(|n| n == token) {
                return Ok(v);
            }
        }
        let v: Vertex = token
            .parse()
            .map_err(|_| TmbError::Validation(format!("no vertex named `{token}`")))?;
        self.instance.check_vertex(v)?;
        Ok(v)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| TmbError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn check_version(v: u32) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(TmbError::Validation(format!(
            "unsupported format_version {v}, expected {FORMAT_VERSION}"
        )))
    }
}

fn gadget_document(meta: &GadgetMeta) -> GadgetDocument {
    let mut doc = GadgetDocument {
        a: None,
        b: None,
        kind: String::new(),
        measure: None,
        no_value_lower_bound: meta.no_value_lower_bound,
        sources: None,
        variable_map: meta.variable_map.clone(),
        yes_value: meta.yes_value,
    };
    match &meta.kind {
        GadgetKind::SingleSource(p) => {
            doc.kind = "single-source".into();
            doc.measure = Some(p.measure.tag().into());
            doc.a = Some(p.a);
            doc.b = Some(p.b);
        }
        GadgetKind::TwoSource { sources } => {
            doc.kind = "two-source".into();
            doc.sources = Some(*sources);
        }
    }
    doc
}

fn gadget_meta(doc: &GadgetDocument) -> Result<GadgetMeta> {
    let missing = |f: &str| TmbError::Validation(format!("gadget metadata lacks `{f}`"));
    let kind = match doc.kind.as_str() {
        "single-source" => {
            let measure: Measure = doc
                .measure
                .as_deref()
                .ok_or_else(|| missing("measure"))?
                .parse()?;
            let a = doc.a.ok_or_else(|| missing("a"))?;
            GadgetKind::SingleSource(GadgetParams::new(measure, a, doc.b.unwrap_or(0)))
        }
        "two-source" => GadgetKind::TwoSource {
            sources: doc.sources.ok_or_else(|| missing("sources"))?,
        },
        other => {
            return Err(TmbError::Validation(format!(
                "unknown gadget kind `{other}`"
            )))
        }
    };
    Ok(GadgetMeta {
        kind,
        yes_value: doc.yes_value,
        no_value_lower_bound: doc.no_value_lower_bound,
        variable_map: doc.variable_map.clone(),
    })
}

pub fn instance_document(file: &InstanceFile) -> InstanceDocument {
    let inst = &file.instance;
    InstanceDocument {
        edges: inst.graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
        format_version: FORMAT_VERSION,
        gadget: file.gadget.as_ref().map(gadget_document),
        multiplicity: inst.multiplicity.clone(),
        names: file.names.clone(),
        roles: file
            .roles
            .as_ref()
            .map(|r| r.iter().map(|x| x.tag().to_string()).collect()),
        sources: inst.sources.clone(),
        tau: inst.tau,
        traversal: (0..inst.edge_count())
            .map(|e| TraversalDocument {
                default: inst.traversal.default_weight(e),
                overrides: inst
                    .traversal
                    .overrides(e)
                    .iter()
                    .map(|(&t, &w)| [t, w])
                    .collect(),
            })
            .collect(),
        vertex_count: inst.vertex_count(),
    }
}

pub fn instance_from_document(doc: InstanceDocument) -> Result<InstanceFile> {
    check_version(doc.format_version)?;
    let graph = StaticGraph::new(
        doc.vertex_count,
        doc.edges.iter().map(|e| (e[0], e[1])).collect(),
    )?;
    if doc.traversal.len() != doc.edges.len() {
        return Err(TmbError::Validation(format!(
            "{} traversal entries for {} edges",
            doc.traversal.len(),
            doc.edges.len()
        )));
    }
    let mut defaults = Vec::with_capacity(doc.traversal.len());
    let mut overrides = Vec::with_capacity(doc.traversal.len());
    for (e, t) in doc.traversal.iter().enumerate() {
        let mut map = BTreeMap::new();
        for &[time, w] in &t.overrides {
            if map.insert(time, w).is_some() {
                return Err(TmbError::Validation(format!(
                    "edge {e} overrides time {time} twice"
                )));
            }
        }
        defaults.push(t.default);
        overrides.push(map);
    }
    let instance = Instance::new(
        graph,
        doc.sources.clone(),
        TraversalSpec::new(defaults, overrides)?,
        doc.multiplicity.clone(),
        doc.tau,
    )?;
    if instance.sources != doc.sources {
        return Err(TmbError::Validation(
            "sources must be sorted and distinct".into(),
        ));
    }
    let n = doc.vertex_count;
    if let Some(names) = &doc.names {
        if names.len() != n {
            return Err(TmbError::Validation(format!(
                "{} names for {n} vertices",
                names.len()
            )));
        }
        let mut sorted = names.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(TmbError::Validation("vertex names must be distinct".into()));
        }
    }
    let roles = match &doc.roles {
        Some(r) if r.len() != n => {
            return Err(TmbError::Validation(format!(
                "{} roles for {n} vertices",
                r.len()
            )))
        }
        Some(r) => Some(r.iter().map(|x| x.parse()).collect::<Result<Vec<Role>>>()?),
        None => None,
    };
    let gadget = doc.gadget.as_ref().map(gadget_meta).transpose()?;
    Ok(InstanceFile {
        instance,
        names: doc.names,
        roles,
        gadget,
    })
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile> {
    instance_from_document(from_json(text)?)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    Ok(parse_instance_file(text)?.instance)
}

pub fn serialize_instance_file(file: &InstanceFile) -> String {
    to_json(&instance_document(file))
}

pub fn serialize_instance(instance: &Instance) -> String {
    serialize_instance_file(&InstanceFile::bare(instance.clone()))
}

/// A ReachFast instance: like an instance document, with the shiftable
/// labels in place of the multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachFastDocument {
    pub edges: Vec<[Vertex; 2]>,
    pub format_version: u32,
    pub labels: Vec<Vec<Time>>,
    pub sources: Vec<Vertex>,
    pub tau: Time,
    pub traversal: Vec<TraversalDocument>,
    pub vertex_count: usize,
}

pub fn parse_reachfast(text: &str) -> Result<ReachFastInstance> {
    let doc: ReachFastDocument = from_json(text)?;
    check_version(doc.format_version)?;
    // reuse the instance path for graph and traversal validation
    let skeleton = instance_from_document(InstanceDocument {
        edges: doc.edges,
        format_version: doc.format_version,
        gadget: None,
        multiplicity: vec![1; doc.traversal.len()],
        names: None,
        roles: None,
        sources: doc.sources,
        tau: doc.tau,
        traversal: doc.traversal,
        vertex_count: doc.vertex_count,
    })?
    .instance;
    for (e, set) in doc.labels.iter().enumerate() {
        if set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TmbError::Validation(format!(
                "labels of edge {e} must be strictly increasing"
            )));
        }
    }
    ReachFastInstance::new(
        skeleton.graph,
        skeleton.sources,
        skeleton.traversal,
        Labeling::new(doc.labels),
        doc.tau,
    )
}

pub fn serialize_reachfast(rf: &ReachFastInstance) -> String {
    let skeleton = instance_document(&InstanceFile::bare(Instance {
        graph: rf.graph.clone(),
        sources: rf.sources.clone(),
        traversal: rf.traversal.clone(),
        multiplicity: vec![1; rf.graph.edge_count()],
        tau: rf.tau,
    }));
    to_json(&ReachFastDocument {
        edges: skeleton.edges,
        format_version: FORMAT_VERSION,
        labels: rf.labels.sets().to_vec(),
        sources: skeleton.sources,
        tau: rf.tau,
        traversal: skeleton.traversal,
        vertex_count: skeleton.vertex_count,
    })
}

/// Parses a labeling document; labels are only checked for being positive.
pub fn parse_labeling(text: &str) -> Result<(Labeling, Option<Provenance>)> {
    let doc: LabelingDocument = from_json(text)?;
    check_version(doc.format_version)?;
    for (e, set) in doc.labels.iter().enumerate() {
        if set.contains(&0) {
            return Err(TmbError::Validation(format!("edge {e} carries label 0")));
        }
        if set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(TmbError::Validation(format!(
                "labels of edge {e} must be strictly increasing"
            )));
        }
    }
    Ok((Labeling::new(doc.labels), doc.provenance))
}

/// Parses a labeling and checks it against its instance (edge count and
/// horizon; multiplicity is left to the caller).
pub fn parse_labeling_for(
    text: &str,
    instance: &Instance,
) -> Result<(Labeling, Option<Provenance>)> {
    let (lab, prov) = parse_labeling(text)?;
    lab.check_shape(instance.edge_count(), instance.tau)?;
    Ok((lab, prov))
}

pub fn serialize_labeling(labeling: &Labeling, provenance: Option<&Provenance>) -> String {
    to_json(&LabelingDocument {
        format_version: FORMAT_VERSION,
        labels: labeling.sets().to_vec(),
        provenance: provenance.cloned(),
    })
}

/// Parses DIMACS CNF: `c` comment lines, one `p cnf V C` header, clauses
/// terminated by `0` (possibly spanning lines), optional `%` end marker.
pub fn parse_cnf(text: &str) -> Result<CnfFormula> {
    let err = |line: usize, message: String| TmbError::Parse { line, message };
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "second problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(
                    line_no,
                    "expected `p cnf <variables> <clauses>`".into(),
                ));
            }
            let v = parts[2]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad variable count `{}`", parts[2])))?;
            let c = parts[3]
                .parse::<usize>()
                .map_err(|_| err(line_no, format!("bad clause count `{}`", parts[3])))?;
            header = Some((v, c));
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(line_no, "clause before the problem line".into()));
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad literal `{tok}`")))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = x.unsigned_abs();
            if var > vars as u64 {
                return Err(err(
                    line_no,
                    format!("literal {x} exceeds the declared {vars} variables"),
                ));
            }
            current.push(Literal {
                var: (var - 1) as usize,
                positive: x > 0,
            });
        }
    }
    let Some((vars, count)) = header else {
        return Err(err(last_line.max(1), "missing problem line".into()));
    };
    if !current.is_empty() {
        return Err(err(last_line, "last clause is not terminated by 0".into()));
    }
    if clauses.len() != count {
        return Err(err(
            last_line.max(1),
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(vars, clauses)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Undirected DOT graph; edges are annotated with their labels (if given),
/// multiplicity, default weight and overrides.
pub fn to_dot(file: &InstanceFile, labeling: Option<&Labeling>) -> String {
    let inst = &file.instance;
    let mut out = String::from("graph tmb {\n");
    for v in 0..inst.vertex_count() {
        let shape = if inst.sources.contains(&v) {
            "doublecircle"
        } else {
            "circle"
        };
        let _ = writeln!(
            out,
            "  {v} [label=\"{}\", shape={shape}];",
            dot_escape(&file.name(v))
        );
    }
    for (e, &(u, v)) in inst.graph.edges().iter().enumerate() {
        let mut label = String::new();
        if let Some(l) = labeling {
            let ts: Vec<String> = l.get(e).iter().map(ToString::to_string).collect();
            let _ = write!(label, "{{{}}} ", ts.join(","));
        }
        let _ = write!(
            label,
            "mu={} w={}",
            inst.multiplicity[e],
            inst.traversal.default_weight(e)
        );
        for (t, w) in inst.traversal.overrides(e) {
            let _ = write!(label, " {t}:{w}");
        }
        let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", dot_escape(&label));
    }
    out.push_str("}\n");
    out
}
