//! Converters between the labeling and shifting formulations, and the SAT
//! gadget generators with their witness labelings.

mod cnf;
mod convert;
mod single_source;
mod two_source;

use std::fmt;
use std::str::FromStr;

pub use cnf::{Assignment, CnfFormula, Literal};
pub use convert::{
    apply_shifts, reachfast_brute_force, reachfast_to_tmb, shift_schedule, tmb_to_reachfast, Shift,
};
pub use single_source::{gadget_labeling_from_assignment, gen_single_source_gadget};
pub use two_source::{
    gen_two_source_gadget, two_source_path, two_source_witness_labeling, TwoSourceLayout,
};

use crate::distances::Measure;
use crate::error::{Result, TmbError};
use crate::graph::{EdgeId, Instance, StaticGraph, Time, TraversalSpec, Vertex};

/// What part of a gadget a vertex belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Source,
    VariableTrue,
    VariableFalse,
    VariableIn,
    VariableOut,
    Clause,
    Literal,
    Bridge,
    Z,
    Subdivision,
    Auxiliary,
}

impl Role {
    pub const ALL: [Role; 11] = [
        Role::Source,
        Role::VariableTrue,
        Role::VariableFalse,
        Role::VariableIn,
        Role::VariableOut,
        Role::Clause,
        Role::Literal,
        Role::Bridge,
        Role::Z,
        Role::Subdivision,
        Role::Auxiliary,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Role::Source => "source",
            Role::VariableTrue => "variable-true",
            Role::VariableFalse => "variable-false",
            Role::VariableIn => "variable-in",
            Role::VariableOut => "variable-out",
            Role::Clause => "clause",
            Role::Literal => "literal",
            Role::Bridge => "bridge",
            Role::Z => "z",
            Role::Subdivision => "subdivision",
            Role::Auxiliary => "auxiliary",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Role {
    type Err = TmbError;

    fn from_str(s: &str) -> Result<Self> {
        Role::ALL
            .into_iter()
            .find(|r| r.tag() == s)
            .ok_or_else(|| TmbError::Validation(format!("unknown role `{s}`")))
    }
}

/// Parameters of a single-source gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetParams {
    pub measure: Measure,
    pub a: Time,
    /// Only used for MW.
    pub b: Time,
}

impl GadgetParams {
    pub fn new(measure: Measure, a: Time, b: Time) -> Self {
        Self { measure, a, b }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(TmbError::InvalidParams(m.to_string()));
        match self.measure {
            Measure::Ft if self.a < 1 => bad("FT needs a >= 1"),
            Measure::St if self.a < 2 => bad("ST needs a >= 2"),
            // For a > 3 a true variable occurring negated pushes its chain past a + 3.
            Measure::Mh if self.a != 3 => bad("MH needs a = 3"),
            Measure::Mw if self.a < 1 || self.b < 2 => bad("MW needs a >= 1 and b >= 2"),
            Measure::Ea | Measure::Ld => bad("no single-source gadget for EA or LD"),
            _ => Ok(()),
        }
    }
}

/// How a gadget was generated; enough to regenerate it from its formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetKind {
    SingleSource(GadgetParams),
    TwoSource {
        /// Requested number of sources ν.
        sources: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetInstance {
    pub instance: Instance,
    pub kind: GadgetKind,
    /// The formula the gadget was built from.
    pub formula: CnfFormula,
    /// Objective reachable iff the formula is satisfiable (single-source only).
    pub yes_value: Option<Time>,
    /// Lower bound on the optimum for unsatisfiable formulas (single-source only).
    pub no_value_lower_bound: Option<Time>,
    pub roles: Vec<Role>,
    pub names: Vec<String>,
    /// Per variable of the formula, the multiplicity-one edge encoding it
    /// (single-source only).
    pub variable_edges: Vec<EdgeId>,
    /// Structure needed by the witness construction (two-source only).
    pub layout: Option<TwoSourceLayout>,
}

/// Incremental graph assembly with names, roles and sparse weights.
#[derive(Debug, Default)]
pub(crate) struct Builder {
    pub names: Vec<String>,
    pub roles: Vec<Role>,
    pub edges: Vec<(Vertex, Vertex)>,
    pub overrides: Vec<Vec<(Time, Time)>>,
    pub capped: Vec<bool>,
}

impl Builder {
    pub fn vertex(&mut self, name: impl Into<String>, role: Role) -> Vertex {
        self.names.push(name.into());
        self.roles.push(role);
        self.names.len() - 1
    }

    /// Adds an edge with `(time, weight)` overrides; `capped` edges get
    /// multiplicity 1.
    pub fn edge(
        &mut self,
        u: Vertex,
        v: Vertex,
        overrides: &[(Time, Time)],
        capped: bool,
    ) -> EdgeId {
        self.edges.push((u, v));
        self.overrides.push(overrides.to_vec());
        self.capped.push(capped);
        self.edges.len() - 1
    }

    /// Default weight τ where τ = latest override + heaviest override + 1;
    /// uncapped edges get multiplicity τ.
    pub fn finish_sparse(self, sources: Vec<Vertex>) -> Result<(Instance, Vec<String>, Vec<Role>)> {
        let last = self
            .overrides
            .iter()
            .flatten()
            .map(|&(t, _)| t)
            .max()
            .unwrap_or(0);
        let heaviest = self
            .overrides
            .iter()
            .flatten()
            .map(|&(_, w)| w)
            .max()
            .unwrap_or(0);
        let tau = last + heaviest + 1;
        let m = self.edges.len();
        let mut tr = TraversalSpec::uniform(m, tau);
        for (e, ov) in self.overrides.iter().enumerate() {
            for &(t, w) in ov {
                tr.set_override(e, t, w);
            }
        }
        let mu = self
            .capped
            .iter()
            .map(|&c| if c { 1 } else { tau })
            .collect();
        let g = StaticGraph::new(self.names.len(), self.edges)?;
        Ok((
            Instance::new(g, sources, tr, mu, tau)?,
            self.names,
            self.roles,
        ))
    }

    /// Unit weights everywhere, multiplicity 1, horizon `tau`.
    pub fn finish_unit(
        self,
        sources: Vec<Vertex>,
        tau: Time,
    ) -> Result<(Instance, Vec<String>, Vec<Role>)> {
        let m = self.edges.len();
        let g = StaticGraph::new(self.names.len(), self.edges)?;
        let inst = Instance::new(g, sources, TraversalSpec::uniform(m, 1), vec![1; m], tau)?;
        Ok((inst, self.names, self.roles))
    }
}

/// Regenerates a gadget of the given kind from its formula.
pub fn regenerate(formula: &CnfFormula, kind: &GadgetKind) -> Result<GadgetInstance> {
    match kind {
        GadgetKind::SingleSource(p) => gen_single_source_gadget(formula, *p),
        GadgetKind::TwoSource { sources } => gen_two_source_gadget(formula, *sources),
    }
}

/// Witness labeling for any gadget kind.
pub fn witness_labeling(
    gadget: &GadgetInstance,
    assignment: &Assignment,
) -> Result<crate::graph::Labeling> {
    match gadget.kind {
        GadgetKind::SingleSource(_) => gadget_labeling_from_assignment(gadget, assignment),
        GadgetKind::TwoSource { .. } => two_source_witness_labeling(gadget, assignment),
    }
}
