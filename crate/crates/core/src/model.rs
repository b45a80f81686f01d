//! The static (subsistence) level: thimacs, their actions, and the flow and
//! trigger arcs between actions.
//!
//! Element ids are dotted paths. A thimac's id is the path of names from its
//! root (`Court.Decision`); an action node's id appends the capitalized kind
//! (`Court.Decision.Create`). Arc ids are `F<n>` for flows and `T<n>` for
//! triggers, numbered in declaration order.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Create,
    Process,
    Release,
    Transfer,
    Receive,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] =
        [ActionKind::Create, ActionKind::Process, ActionKind::Release, ActionKind::Transfer, ActionKind::Receive];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Create => "Create",
            ActionKind::Process => "Process",
            ActionKind::Release => "Release",
            ActionKind::Transfer => "Transfer",
            ActionKind::Receive => "Receive",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActionKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

/// Whether `source -> target` is a legal flow step in a full model.
///
/// Inside one thimac things move Receive→Process/Release, Process→Release/
/// Create, Create→Process/Release, Release→Transfer and Transfer→Receive.
/// Between thimacs only Transfer→Transfer is legal.
pub fn legal_step(source: ActionKind, target: ActionKind, same_thimac: bool) -> bool {
    use ActionKind::*;
    if !same_thimac {
        return source == Transfer && target == Transfer;
    }
    matches!(
        (source, target),
        (Receive, Process)
            | (Receive, Release)
            | (Process, Release)
            | (Process, Create)
            | (Create, Process)
            | (Create, Release)
            | (Release, Transfer)
            | (Transfer, Receive)
    )
}

pub fn action_id(thimac: &str, kind: ActionKind) -> String {
    format!("{thimac}.{kind}")
}

/// Splits `Court.Create` into (`Court`, Create). Returns `None` when the last
/// segment is not an action kind or there is no owner path.
pub fn split_action_id(id: &str) -> Option<(&str, ActionKind)> {
    let (owner, kind) = id.rsplit_once('.')?;
    Some((owner, kind.parse().ok()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Simplified,
    Full,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simplified => "simplified",
            Mode::Full => "full",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thimac {
    pub id: String,
    pub name: String,
    pub label: Option<String>,
    /// Declared actions in declaration order.
    pub actions: Vec<ActionKind>,
    pub children: Vec<String>,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionNode {
    pub id: String,
    pub kind: ActionKind,
    pub owner: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DelayUnit {
    Ticks,
    Minutes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Delay {
    pub amount: u64,
    pub unit: DelayUnit,
}

impl Delay {
    pub fn ticks(amount: u64) -> Self {
        Delay { amount, unit: DelayUnit::Ticks }
    }

    pub fn minutes(amount: u64) -> Self {
        Delay { amount, unit: DelayUnit::Minutes }
    }

    pub fn in_ticks(self, ticks_per_minute: u64) -> u64 {
        match self.unit {
            DelayUnit::Ticks => self.amount,
            DelayUnit::Minutes => self.amount.saturating_mul(ticks_per_minute),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowArc {
    pub id: String,
    pub source: String,
    pub target: String,
    pub thing: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerArc {
    pub id: String,
    pub source: String,
    pub target: String,
    /// Propagation delay; `None` means the default (one tick for enabling,
    /// immediate for termination).
    pub delay: Option<Delay>,
    pub guard: Option<Expr>,
    pub terminates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    Flow,
    Trigger,
}

/// Borrowed view over either kind of arc.
#[derive(Debug, Clone, Copy)]
pub struct ArcRef<'a> {
    pub id: &'a str,
    pub source: &'a str,
    pub target: &'a str,
    pub kind: ArcKind,
    pub trigger: Option<&'a TriggerArc>,
}

impl ArcRef<'_> {
    pub fn terminates(&self) -> bool {
        self.trigger.is_some_and(|t| t.terminates)
    }

    pub fn guard(&self) -> Option<&Expr> {
        self.trigger.and_then(|t| t.guard.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticModel {
    pub mode: Mode,
    /// All thimacs in declaration pre-order.
    pub thimacs: Vec<Thimac>,
    pub flows: Vec<FlowArc>,
    pub triggers: Vec<TriggerArc>,
}

impl StaticModel {
    pub fn new(mode: Mode) -> Self {
        StaticModel { mode, thimacs: Vec::new(), flows: Vec::new(), triggers: Vec::new() }
    }

    /// Adds a thimac at `path`, registering it with its parent when the
    /// parent already exists. Performs no validation.
    pub fn add_thimac(&mut self, path: &str, actions: &[ActionKind]) -> &mut Thimac {
        let (parent, name) = match path.rsplit_once('.') {
            Some((p, n)) => (Some(p.to_string()), n.to_string()),
            None => (None, path.to_string()),
        };
        if let Some(p) = parent.as_deref().and_then(|p| self.thimacs.iter_mut().find(|t| t.id == p)) {
            p.children.push(path.to_string());
        }
        self.thimacs.push(Thimac {
            id: path.to_string(),
            name,
            label: None,
            actions: actions.to_vec(),
            children: Vec::new(),
            parent,
        });
        self.thimacs.last_mut().expect("just pushed")
    }

    pub fn add_flow(&mut self, source: &str, target: &str, thing: Option<&str>) -> &mut FlowArc {
        let id = format!("F{}", self.flows.len() + 1);
        self.flows.push(FlowArc {
            id,
            source: source.to_string(),
            target: target.to_string(),
            thing: thing.map(str::to_string),
        });
        self.flows.last_mut().expect("just pushed")
    }

    pub fn add_trigger(&mut self, source: &str, target: &str) -> &mut TriggerArc {
        let id = format!("T{}", self.triggers.len() + 1);
        self.triggers.push(TriggerArc {
            id,
            source: source.to_string(),
            target: target.to_string(),
            delay: None,
            guard: None,
            terminates: false,
        });
        self.triggers.last_mut().expect("just pushed")
    }

    pub fn thimac(&self, id: &str) -> Option<&Thimac> {
        self.thimacs.iter().find(|t| t.id == id)
    }

    pub fn roots(&self) -> impl Iterator<Item = &Thimac> {
        self.thimacs.iter().filter(|t| t.parent.is_none())
    }

    /// Action nodes in thimac order, then declared action order.
    pub fn action_nodes(&self) -> Vec<ActionNode> {
        self.thimacs
            .iter()
            .flat_map(|t| {
                t.actions.iter().map(move |&kind| ActionNode { id: action_id(&t.id, kind), kind, owner: t.id.clone() })
            })
            .collect()
    }

    pub fn has_action(&self, id: &str) -> bool {
        split_action_id(id)
            .and_then(|(owner, kind)| self.thimac(owner).map(|t| t.actions.contains(&kind)))
            .unwrap_or(false)
    }

    pub fn is_element(&self, id: &str) -> bool {
        self.thimac(id).is_some() || self.has_action(id)
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcRef<'_>> {
        let flows = self.flows.iter().map(|f| ArcRef {
            id: &f.id,
            source: &f.source,
            target: &f.target,
            kind: ArcKind::Flow,
            trigger: None,
        });
        let triggers = self.triggers.iter().map(|t| ArcRef {
            id: &t.id,
            source: &t.source,
            target: &t.target,
            kind: ArcKind::Trigger,
            trigger: Some(t),
        });
        flows.chain(triggers)
    }

    /// Outgoing arcs per action id, flows before triggers, in declaration order.
    pub fn out_arcs(&self) -> HashMap<&str, Vec<ArcRef<'_>>> {
        let mut out: HashMap<&str, Vec<ArcRef<'_>>> = HashMap::new();
        for arc in self.arcs() {
            out.entry(arc.source).or_default().push(arc);
        }
        out
    }

    /// Flow-only reachability from `from` (excluding `from` itself unless on a cycle).
    pub fn flow_reachable(&self, from: &str) -> BTreeSet<String> {
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for f in &self.flows {
            adj.entry(&f.source).or_default().push(&f.target);
        }
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = adj.get(from).cloned().unwrap_or_default();
        while let Some(n) = stack.pop() {
            if seen.insert(n.to_string()) {
                stack.extend(adj.get(n).into_iter().flatten().copied());
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleCode {
    DuplicateId,
    MissingParent,
    ContainmentCycle,
    DuplicateAction,
    DanglingArc,
    SelfLoop,
    IllegalFlowStep,
    TerminatesNonCreate,
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub element: String,
    pub rule: RuleCode,
    pub message: String,
}

impl Diagnostic {
    fn error(element: &str, rule: RuleCode, message: String) -> Self {
        Diagnostic { severity: Severity::Error, element: element.to_string(), rule, message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}: {}", self.rule, self.element, self.message)
    }
}

/// Checks the metamodel invariants plus, in full mode, flow-step legality.
pub fn validate_static(model: &StaticModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for t in &model.thimacs {
        if !seen.insert(t.id.as_str()) {
            out.push(Diagnostic::error(&t.id, RuleCode::DuplicateId, "thimac id declared twice".into()));
        }
    }
    let arc_ids = model.arcs().map(|a| a.id);
    let mut seen_arcs = HashSet::new();
    for id in arc_ids {
        if !seen_arcs.insert(id) || seen.contains(id) {
            out.push(Diagnostic::error(id, RuleCode::DuplicateId, "arc id is not unique".into()));
        }
    }

    for t in &model.thimacs {
        if let Some(p) = &t.parent {
            match model.thimac(p) {
                None => {
                    out.push(Diagnostic::error(&t.id, RuleCode::MissingParent, format!("parent `{p}` does not exist")))
                }
                Some(parent) if !parent.children.contains(&t.id) => out.push(Diagnostic::error(
                    &t.id,
                    RuleCode::MissingParent,
                    format!("parent `{p}` does not list this thimac as a child"),
                )),
                _ => {}
            }
        }
        for c in &t.children {
            if model.thimac(c).and_then(|c| c.parent.as_deref()) != Some(t.id.as_str()) {
                out.push(Diagnostic::error(
                    &t.id,
                    RuleCode::MissingParent,
                    format!("child `{c}` missing or owned elsewhere"),
                ));
            }
        }
        // walk up; a chain longer than the thimac count must revisit a node
        let mut cur = t.parent.as_deref();
        let mut steps = 0;
        while let Some(p) = cur {
            steps += 1;
            if p == t.id || steps > model.thimacs.len() {
                out.push(Diagnostic::error(&t.id, RuleCode::ContainmentCycle, "thimac is its own ancestor".into()));
                break;
            }
            cur = model.thimac(p).and_then(|t| t.parent.as_deref());
        }
        let mut kinds = HashSet::new();
        for k in &t.actions {
            if !kinds.insert(k) {
                out.push(Diagnostic::error(
                    &action_id(&t.id, *k),
                    RuleCode::DuplicateAction,
                    format!("{k} declared twice in `{}`", t.id),
                ));
            }
        }
    }

    for arc in model.arcs() {
        let mut dangling = false;
        for end in [arc.source, arc.target] {
            if !model.has_action(end) {
                dangling = true;
                out.push(Diagnostic::error(
                    arc.id,
                    RuleCode::DanglingArc,
                    format!("endpoint `{end}` is not an action node"),
                ));
            }
        }
        if arc.source == arc.target {
            out.push(Diagnostic::error(arc.id, RuleCode::SelfLoop, "source equals target".into()));
        }
        if dangling {
            continue;
        }
        let (src_owner, src_kind) = split_action_id(arc.source).expect("checked above");
        let (tgt_owner, tgt_kind) = split_action_id(arc.target).expect("checked above");
        if arc.terminates() && tgt_kind != ActionKind::Create {
            out.push(Diagnostic::error(
                arc.id,
                RuleCode::TerminatesNonCreate,
                format!("terminating trigger must target a Create action, not {tgt_kind}"),
            ));
        }
        if arc.kind == ArcKind::Flow
            && model.mode == Mode::Full
            && arc.source != arc.target
            && !legal_step(src_kind, tgt_kind, src_owner == tgt_owner)
        {
            let scope = if src_owner == tgt_owner { "within a thimac" } else { "across thimacs" };
            out.push(Diagnostic::error(
                arc.id,
                RuleCode::IllegalFlowStep,
                format!("{src_kind} -> {tgt_kind} is not a legal flow step {scope}"),
            ));
        }
    }
    out
}

/// A connected subdiagram of a static model. Elements are thimac and action
/// ids in the order given; flow arcs between member actions belong to the
/// region implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    elements: Vec<String>,
}

impl Region {
    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn contains(&self, id: &str) -> bool {
        self.elements.iter().any(|e| e == id)
    }

    /// Member action ids, in region order.
    pub fn actions(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(String::as_str).filter(|e| split_action_id(e).is_some())
    }

    pub fn action_set(&self) -> BTreeSet<&str> {
        self.actions().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("region is empty")]
    Empty,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("region is not connected; components: {}", fmt_components(.0))]
    NotConnected(Vec<Vec<String>>),
}

fn fmt_components(c: &[Vec<String>]) -> String {
    c.iter().map(|c| format!("{{{}}}", c.join(", "))).collect::<Vec<_>>().join(" ")
}

/// Builds a region from `ids`, requiring the induced subgraph to be connected
/// when trigger arcs are ignored. Duplicates are dropped, first occurrence wins.
pub fn extract_region<S: AsRef<str>>(model: &StaticModel, ids: &[S]) -> Result<Region, RegionError> {
    let mut elements: Vec<String> = Vec::new();
    for id in ids {
        let id = id.as_ref();
        if !model.is_element(id) {
            return Err(RegionError::UnknownElement(id.to_string()));
        }
        if !elements.iter().any(|e| e == id) {
            elements.push(id.to_string());
        }
    }
    if elements.is_empty() {
        return Err(RegionError::Empty);
    }
    let components = components(model, &elements);
    if components.len() > 1 {
        return Err(RegionError::NotConnected(components));
    }
    Ok(Region { elements })
}

/// Undirected components of the element set, each listed in element order.
fn components(model: &StaticModel, elements: &[String]) -> Vec<Vec<String>> {
    let index: BTreeMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..elements.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let union = |a: &str, b: &str, parent: &mut Vec<usize>| {
        if let (Some(&a), Some(&b)) = (index.get(a), index.get(b)) {
            let (ra, rb) = (find(parent, a), find(parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for e in elements {
        if let Some((owner, _)) = split_action_id(e) {
            union(owner, e, &mut parent);
        } else if let Some(p) = model.thimac(e).and_then(|t| t.parent.as_deref()) {
            union(p, e, &mut parent);
        }
    }
    for f in &model.flows {
        union(&f.source, &f.target, &mut parent);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(e.clone());
    }
    groups.into_values().collect()
}
