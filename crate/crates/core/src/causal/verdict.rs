use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CausalError;
use crate::dynamics::{Event, SimError, Tick, Trace};
use crate::model::ArcRef;
use crate::Document;

/// One arc of a witnessing path, crossed at tick `at`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessHop {
    pub arc: String,
    pub source: String,
    pub target: String,
    pub at: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum CausalVerdict {
    /// An arc path from cause to effect was actualized in the trace.
    Causal {
        witness: Vec<WitnessHop>,
    },
    /// The cause came first but nothing carried it to the effect.
    ChronologicalOnly {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        failed_guard: Option<String>,
    },
    NotRelated,
    NotActualized,
}

impl CausalVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            CausalVerdict::Causal { .. } => "Causal",
            CausalVerdict::ChronologicalOnly { .. } => "ChronologicalOnly",
            CausalVerdict::NotRelated => "NotRelated",
            CausalVerdict::NotActualized => "NotActualized",
        }
    }

    pub fn is_causal(&self) -> bool {
        matches!(self, CausalVerdict::Causal { .. })
    }
}

struct Search<'a> {
    trace: &'a Trace,
    events: Vec<Event>,
    out_arcs: std::collections::HashMap<&'a str, Vec<ArcRef<'a>>>,
    cause: BTreeSet<&'a str>,
    effect: BTreeSet<&'a str>,
    deadline: Tick,
    seen: BTreeSet<(&'a str, Tick)>,
    failed_guard: Option<String>,
}

/// Judges whether `cause` actually caused `effect` in `trace`.
///
/// Causal needs a realization pair with the cause starting no later than the
/// effect, joined by an arc path whose guards held when crossed and whose
/// intermediate nodes, where they belong to some event, were realized in time.
pub fn judge_causal(doc: &Document, trace: &Trace, cause: &str, effect: &str) -> Result<CausalVerdict, CausalError> {
    if cause == effect {
        return Err(CausalError::SameEvent(cause.into()));
    }
    let ce = doc.event(cause).ok_or_else(|| CausalError::UnknownEvent(cause.into()))?;
    let ee = doc.event(effect).ok_or_else(|| CausalError::UnknownEvent(effect.into()))?;
    let cause_starts: BTreeSet<Tick> = trace.realizations_of(cause).map(|r| r.start).collect();
    if cause_starts.is_empty() {
        return Ok(CausalVerdict::NotActualized);
    }
    let effect_starts: BTreeSet<Tick> = trace.realizations_of(effect).map(|r| r.start).collect();

    let events = doc.event_list();
    let mut failed_guard = None;
    for &es in &effect_starts {
        for &cs in cause_starts.iter().filter(|&&cs| cs <= es) {
            let mut s = Search {
                trace,
                events: events.clone(),
                out_arcs: doc.model.out_arcs(),
                cause: ce.region.action_set(),
                effect: ee.region.action_set(),
                deadline: es,
                seen: BTreeSet::new(),
                failed_guard: None,
            };
            if let Some(witness) = s.run(cs)? {
                return Ok(CausalVerdict::Causal { witness });
            }
            failed_guard = failed_guard.or(s.failed_guard);
        }
    }
    let chronological = cause_starts.iter().any(|&cs| effect_starts.iter().any(|&es| cs < es));
    Ok(if chronological { CausalVerdict::ChronologicalOnly { failed_guard } } else { CausalVerdict::NotRelated })
}

impl<'a> Search<'a> {
    fn run(&mut self, start: Tick) -> Result<Option<Vec<WitnessHop>>, CausalError> {
        let starts: Vec<&'a str> = self.cause.iter().copied().collect();
        for node in starts {
            let mut path = Vec::new();
            if self.visit(node, start, &mut path)? {
                return Ok(Some(path));
            }
        }
        Ok(None)
    }

    fn visit(&mut self, node: &'a str, at: Tick, path: &mut Vec<WitnessHop>) -> Result<bool, CausalError> {
        if !self.seen.insert((node, at)) {
            return Ok(false);
        }
        let arcs = self.out_arcs.get(node).cloned().unwrap_or_default();
        for arc in arcs {
            if let Some(g) = arc.guard() {
                if !self.guard_holds(g, at)? {
                    self.failed_guard.get_or_insert_with(|| format!("{}: {g}", arc.id));
                    continue;
                }
            }
            let hop = WitnessHop { arc: arc.id.into(), source: node.into(), target: arc.target.into(), at };
            if self.effect.contains(arc.target) {
                path.push(hop);
                return Ok(true);
            }
            if arc.terminates() {
                continue;
            }
            for next in self.arrivals(arc.target, at) {
                path.push(hop.clone());
                if self.visit(arc.target, next, path)? {
                    return Ok(true);
                }
                path.pop();
            }
        }
        Ok(false)
    }

    /// Ticks at which the path may continue from `node`: unchanged outside
    /// every event region and inside the cause, otherwise the start of a
    /// containing event realized between `at` and the effect.
    fn arrivals(&self, node: &str, at: Tick) -> Vec<Tick> {
        if self.cause.contains(node) {
            return vec![at];
        }
        let containing: Vec<&Event> = self.events.iter().filter(|e| e.region.contains(node)).collect();
        if containing.is_empty() {
            return vec![at];
        }
        let ticks: BTreeSet<Tick> = containing
            .iter()
            .flat_map(|e| self.trace.realizations_of(&e.id))
            .map(|r| r.start)
            .filter(|&s| at <= s && s <= self.deadline)
            .collect();
        ticks.into_iter().collect()
    }

    fn guard_holds(&self, guard: &crate::expr::Expr, at: Tick) -> Result<bool, CausalError> {
        let lookup = |name: &str| -> Result<i64, SimError> {
            if let Some(v) = self.trace.config.exogenous.get(name) {
                return Ok(*v);
            }
            match self.events.iter().find(|e| e.id == name) {
                Some(e) => Ok(i64::from(self.trace.realizations_of(name).any(|r| r.active_at(at, e.is_state)))),
                None => Err(SimError::GuardUnresolvable(name.into())),
            }
        };
        Ok(guard.eval(&lookup)? != 0)
    }
}
