//! The existence level: events as realized regions, chronologies, and the
//! discrete-tick simulator.

mod chronology;
pub(crate) mod links;
mod simulate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::document::ConfigError;
use crate::model::Region;

pub use chronology::{build_chronology, Chronology, ChronologyError};
pub use simulate::{check_simultaneous, simulate};

/// Logical time.
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub description: String,
    pub region: Region,
    pub polarity: Polarity,
    pub is_state: bool,
    pub repeat: Option<u32>,
    /// For an absence event, the positive event over the same region.
    pub counterpart_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Injection {
    pub event: String,
    pub at: Tick,
    pub every: Option<Tick>,
}

impl Injection {
    pub fn fires_at(&self, t: Tick) -> bool {
        match self.every {
            Some(p) if p > 0 => t >= self.at && (t - self.at).is_multiple_of(p),
            _ => t == self.at,
        }
    }

    pub fn fires_after(&self, t: Tick) -> bool {
        self.every.is_some_and(|p| p > 0) || self.at > t
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub max_ticks: Tick,
    pub ticks_per_minute: Tick,
    pub initial: BTreeSet<String>,
    pub deadlines: BTreeMap<String, Tick>,
    pub exogenous: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub injections: Vec<Injection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub event: String,
    pub start: Tick,
    /// Instant events close at their last tick; states stay open until a
    /// terminating trigger fires.
    pub end: Option<Tick>,
}

impl Realization {
    /// Whether the realization covers tick `t`. Instants cover `[start, end]`,
    /// states `[start, end)`.
    pub fn active_at(&self, t: Tick, is_state: bool) -> bool {
        match (self.end, is_state) {
            (None, _) => self.start <= t,
            (Some(e), true) => self.start <= t && t < e,
            (Some(e), false) => self.start <= t && t <= e,
        }
    }

    /// Inclusive tick range covered, `None` for a state closed on its start tick.
    pub fn covered(&self, is_state: bool) -> Option<(Tick, Tick)> {
        match (self.end, is_state) {
            (None, _) => Some((self.start, Tick::MAX)),
            (Some(e), true) if e == self.start => None,
            (Some(e), true) => Some((self.start, e - 1)),
            (Some(e), false) => Some((self.start, e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub model: String,
    pub config: SimConfig,
    pub realizations: Vec<Realization>,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<crate::causal::Analysis>,
}

impl Trace {
    pub fn realizations_of<'a>(&'a self, event: &'a str) -> impl Iterator<Item = &'a Realization> + 'a {
        self.realizations.iter().filter(move |r| r.event == event)
    }

    pub fn first_start(&self, event: &str) -> Option<Tick> {
        self.realizations_of(event).map(|r| r.start).min()
    }

    pub fn is_realized(&self, event: &str) -> bool {
        self.realizations_of(event).next().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("guard references `{0}`, which has no assigned value")]
    GuardUnresolvable(String),
    #[error("guard evaluation failed: {0}")]
    Guard(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("event `{0}` is not realized in the trace")]
    NotRealized(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
}

/// Splits an event into one generic event per action node of its region,
/// ordered by flow order inside the region. A single-action event comes back
/// unchanged.
pub fn decompose_event(doc: &crate::Document, event: &str) -> Result<Vec<Event>, DecomposeError> {
    let e = doc.event(event).ok_or_else(|| DecomposeError::UnknownEvent(event.into()))?;
    let actions: Vec<&str> = e.region.actions().collect();
    if actions.len() == 1 {
        return Ok(vec![e]);
    }
    let order = flow_order(&doc.model, &actions);
    Ok(order
        .into_iter()
        .map(|a| {
            let (owner, kind) = crate::model::split_action_id(a).expect("action id");
            Event {
                id: format!("{}/{a}", e.id),
                description: format!("{kind} at {owner}"),
                region: crate::model::extract_region(&doc.model, &[a]).expect("singleton region"),
                polarity: e.polarity,
                is_state: false,
                repeat: None,
                counterpart_of: e.counterpart_of.as_ref().map(|c| format!("{c}/{a}")),
            }
        })
        .collect())
}

/// Topological order of `actions` along flow arcs internal to the set; ties
/// and cycles fall back to the given order.
fn flow_order<'a>(model: &crate::model::StaticModel, actions: &[&'a str]) -> Vec<&'a str> {
    let mut indegree: BTreeMap<&str, usize> = actions.iter().map(|a| (*a, 0)).collect();
    let internal: Vec<(&str, &str)> = model
        .flows
        .iter()
        .filter(|f| indegree.contains_key(f.source.as_str()) && indegree.contains_key(f.target.as_str()))
        .map(|f| (f.source.as_str(), f.target.as_str()))
        .collect();
    for (_, t) in &internal {
        *indegree.get_mut(t).expect("member") += 1;
    }
    let mut out: Vec<&'a str> = Vec::with_capacity(actions.len());
    let mut done: BTreeSet<&str> = BTreeSet::new();
    while out.len() < actions.len() {
        let next = actions
            .iter()
            .find(|a| !done.contains(**a) && indegree[**a] == 0)
            .or_else(|| actions.iter().find(|a| !done.contains(**a)))
            .copied()
            .expect("remaining action");
        done.insert(next);
        out.push(next);
        for (s, t) in &internal {
            if *s == next && !done.contains(t) {
                let d = indegree.get_mut(t).expect("member");
                *d = d.saturating_sub(1);
            }
        }
    }
    out
}
