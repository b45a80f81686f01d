//! Causal level: variables mapped onto events, structural equations, the
//! abstraction of a TM document into a causal graph, and verdicts over traces.

mod verdict;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::document::{Domain, EquationDecl, VariableDecl};
use crate::dynamics::links::{links, Area};
use crate::dynamics::{SimError, Trace};
use crate::expr::ExprError;
use crate::Document;

pub use verdict::{judge_causal, CausalVerdict, WitnessHop};

pub type Variable = VariableDecl;
pub type StructuralEquation = EquationDecl;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub variables: Vec<Variable>,
    pub edges: Vec<(String, String)>,
    pub equations: Vec<StructuralEquation>,
}

/// Values by variable name. `complete` is false when some variable could not
/// be resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: BTreeMap<String, i64>,
    pub complete: bool,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment { values: BTreeMap::new(), complete: true }
    }

    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.values.get(name).copied()
    }
}

impl FromIterator<(String, i64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (String, i64)>>(iter: I) -> Self {
        Assignment { values: iter.into_iter().collect(), complete: true }
    }
}

/// A verdict for one cause/effect pair, as stored in a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub cause: String,
    pub effect: String,
    pub verdict: CausalVerdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Assignment>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Judgement>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CausalError {
    #[error("causal graph is cyclic through {}", .0.join(" -> "))]
    CyclicGraph(Vec<String>),
    #[error("no value given for exogenous variable `{0}`")]
    MissingExogenous(String),
    #[error("`{0}` is determined by an equation and cannot be set")]
    NotExogenous(String),
    #[error("value {value} is outside the domain of `{name}`")]
    DomainViolation { name: String, value: i64 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("evaluating `{name}`: {message}")]
    Evaluation { name: String, message: String },
    #[error("document declares no variables")]
    NoVariables,
    #[error("variable `{variable}` maps overlapping realizations to values {values:?}")]
    AmbiguousMapping { variable: String, values: Vec<i64> },
    #[error("cause and effect are the same event `{0}`")]
    SameEvent(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

impl CausalGraph {
    /// Graph whose edges are the parent relation of the equations.
    pub fn from_equations(variables: Vec<Variable>, equations: Vec<StructuralEquation>) -> Self {
        let mut edges = Vec::new();
        for eq in &equations {
            for n in eq.body.names() {
                let e = (n.to_string(), eq.target.clone());
                if !edges.contains(&e) {
                    edges.push(e);
                }
            }
        }
        CausalGraph { variables, edges, equations }
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn has_edge(&self, u: &str, v: &str) -> bool {
        self.edges.iter().any(|(a, b)| a == u && b == v)
    }

    pub fn parents(&self, v: &str) -> Vec<&str> {
        self.edges.iter().filter(|(_, b)| b == v).map(|(a, _)| a.as_str()).collect()
    }

    fn equation(&self, name: &str) -> Option<&StructuralEquation> {
        self.equations.iter().find(|e| e.target == name)
    }

    /// Topological order over graph edges plus equation dependencies; ties
    /// break by declaration order.
    pub fn topological_order(&self) -> Result<Vec<String>, CausalError> {
        let names: Vec<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
        let pos: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut deps: BTreeSet<(usize, usize)> = BTreeSet::new();
        let eq_edges =
            self.equations.iter().flat_map(|e| e.body.names().into_iter().map(move |n| (n, e.target.as_str())));
        for (a, b) in self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).chain(eq_edges) {
            let ia = *pos.get(a).ok_or_else(|| CausalError::UnknownVariable(a.into()))?;
            let ib = *pos.get(b).ok_or_else(|| CausalError::UnknownVariable(b.into()))?;
            deps.insert((ia, ib));
        }
        let n = names.len();
        let mut indegree = vec![0usize; n];
        for &(_, b) in &deps {
            indegree[b] += 1;
        }
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let Some(next) = (0..n).find(|&i| !done[i] && indegree[i] == 0) else {
                let rest: Vec<usize> = (0..n).filter(|&i| !done[i]).collect();
                let cycle = cycle_among(&rest, &deps).into_iter().map(|i| names[i].to_string()).collect();
                return Err(CausalError::CyclicGraph(cycle));
            };
            done[next] = true;
            order.push(names[next].to_string());
            for &(a, b) in &deps {
                if a == next {
                    indegree[b] -= 1;
                }
            }
        }
        Ok(order)
    }
}

/// Walks predecessors among `rest` (every node there has one) until a node repeats.
fn cycle_among(rest: &[usize], deps: &BTreeSet<(usize, usize)>) -> Vec<usize> {
    let mut path = vec![rest[0]];
    loop {
        let cur = *path.last().expect("non-empty");
        let pred = deps
            .iter()
            .find(|&&(a, b)| b == cur && rest.contains(&a))
            .map(|&(a, _)| a)
            .expect("blocked node has a blocked predecessor");
        if let Some(i) = path.iter().position(|&p| p == pred) {
            let mut cycle: Vec<usize> = path[i..].iter().rev().copied().collect();
            cycle.push(cycle[0]);
            return cycle;
        }
        path.push(pred);
    }
}

/// Evaluates every equation in topological order. Variables without an
/// equation must be assigned in `exogenous`; results must stay in domain.
pub fn evaluate_equations(graph: &CausalGraph, exogenous: &Assignment) -> Result<Assignment, CausalError> {
    for (name, &value) in &exogenous.values {
        let var = graph.variable(name).ok_or_else(|| CausalError::UnknownVariable(name.clone()))?;
        if graph.equation(name).is_some() {
            return Err(CausalError::NotExogenous(name.clone()));
        }
        check_domain(name, var.domain, value)?;
    }
    let mut values: BTreeMap<String, i64> = BTreeMap::new();
    for name in graph.topological_order()? {
        let var = graph.variable(&name).expect("ordered names are declared");
        let value = match graph.equation(&name) {
            Some(eq) => {
                let lookup = |n: &str| -> Result<i64, ExprError> {
                    values.get(n).copied().ok_or_else(|| ExprError::Unresolved(n.to_string()))
                };
                eq.body.eval(&lookup).map_err(|e| match e {
                    ExprError::Unresolved(n) if graph.variable(&n).is_none() => CausalError::UnknownVariable(n),
                    other => CausalError::Evaluation { name: name.clone(), message: other.to_string() },
                })?
            }
            None => exogenous.get(&name).ok_or_else(|| CausalError::MissingExogenous(name.clone()))?,
        };
        check_domain(&name, var.domain, value)?;
        values.insert(name, value);
    }
    Ok(Assignment { values, complete: true })
}

fn check_domain(name: &str, domain: Domain, value: i64) -> Result<(), CausalError> {
    if domain.contains(value) {
        Ok(())
    } else {
        Err(CausalError::DomainViolation { name: name.to_string(), value })
    }
}

/// Per variable, the union of the regions of its mapped events. A node is
/// terminable when every mapped event containing it is a state.
pub(crate) fn variable_areas(doc: &Document) -> Vec<Area> {
    let events = doc.event_list();
    doc.variables
        .iter()
        .map(|v| {
            let mapped: Vec<_> = v.values.iter().filter_map(|(_, id)| events.iter().find(|e| &e.id == id)).collect();
            let nodes: BTreeSet<String> = mapped.iter().flat_map(|e| e.region.actions().map(str::to_string)).collect();
            let terminable = nodes
                .iter()
                .filter(|n| mapped.iter().filter(|e| e.region.contains(n)).all(|e| e.is_state))
                .cloned()
                .collect();
            Area { nodes, terminable }
        })
        .collect()
}

/// Keeps only the variable regions: an edge runs from `u` to `v` when an arc
/// path leads from `u`'s area into `v`'s without crossing a third area.
pub fn abstract_to_causal_graph(doc: &Document) -> Result<CausalGraph, CausalError> {
    if doc.variables.is_empty() {
        return Err(CausalError::NoVariables);
    }
    let areas = variable_areas(doc);
    let pairs: BTreeSet<(usize, usize)> = links(&doc.model, &areas).into_iter().map(|l| (l.from, l.to)).collect();
    let name = |i: usize| doc.variables[i].name.clone();
    let graph = CausalGraph {
        variables: doc.variables.clone(),
        edges: pairs.into_iter().map(|(a, b)| (name(a), name(b))).collect(),
        equations: doc.equations.clone(),
    };
    graph.topological_order()?;
    Ok(graph)
}

/// (value, covered intervals, latest start)
type Hit = (i64, Vec<(u64, u64)>, u64);

/// Reads each variable off the trace: the value whose mapped event realized.
/// Values realized at disjoint times resolve to the latest one.
pub fn assignment_from_trace(doc: &Document, trace: &Trace) -> Result<Assignment, CausalError> {
    let events = doc.event_list();
    let mut out = Assignment::new();
    for var in &doc.variables {
        let mut hits: Vec<Hit> = Vec::new();
        for (value, id) in &var.values {
            let is_state = events.iter().find(|e| &e.id == id).is_some_and(|e| e.is_state);
            let rs: Vec<_> = trace.realizations_of(id).collect();
            let Some(latest) = rs.iter().map(|r| r.start).max() else { continue };
            let spans = rs.iter().filter_map(|r| r.covered(is_state)).collect();
            hits.push((*value, spans, latest));
        }
        for (i, a) in hits.iter().enumerate() {
            for b in &hits[i + 1..] {
                let overlap = a.1.iter().any(|x| b.1.iter().any(|y| x.0 <= y.1 && y.0 <= x.1));
                if a.0 != b.0 && overlap {
                    return Err(CausalError::AmbiguousMapping { variable: var.name.clone(), values: vec![a.0, b.0] });
                }
            }
        }
        match hits.iter().max_by_key(|h| h.2) {
            Some(h) => {
                out.values.insert(var.name.clone(), h.0);
            }
            None => out.complete = false,
        }
    }
    Ok(out)
}
