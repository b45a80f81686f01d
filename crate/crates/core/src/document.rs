//! A parsed `.tm` document: the static model plus everything declared on
//! top of it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Event, Injection, Polarity, SimConfig};
use crate::expand::{expand_simplified_traced, ExpandError};
use crate::expr::Expr;
use crate::model::{Region, StaticModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: usize,
    pub column: usize,
}

/// Source positions keyed by element (`thimac:Court`, `event:E1`, ...).
/// Spans never take part in equality, so a reparsed document compares equal
/// to the original.
#[derive(Debug, Clone, Default)]
pub struct SpanTable(pub BTreeMap<String, Span>);

impl PartialEq for SpanTable {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl SpanTable {
    pub fn get(&self, key: &str) -> Option<Span> {
        self.0.get(key).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsenceDecl {
    pub id: String,
    pub description: String,
    pub repeat: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventDecl {
    pub id: String,
    pub description: String,
    pub region: Region,
    pub is_state: bool,
    pub repeat: Option<u32>,
    pub absence: Option<AbsenceDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Bool,
    Int { lo: i64, hi: i64 },
}

impl Domain {
    pub fn contains(self, v: i64) -> bool {
        match self {
            Domain::Bool => v == 0 || v == 1,
            Domain::Int { lo, hi } => lo <= v && v <= hi,
        }
    }

    pub fn values(self) -> impl Iterator<Item = i64> {
        let (lo, hi) = match self {
            Domain::Bool => (0, 1),
            Domain::Int { lo, hi } => (lo, hi),
        };
        lo..=hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Domain,
    /// Value → event id, in declaration order.
    pub values: Vec<(i64, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationDecl {
    pub target: String,
    pub body: Expr,
}

/// Entries of a `simulate` or `scenario` block.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimDirectives {
    pub max_ticks: Option<u64>,
    pub ticks_per_minute: Option<u64>,
    pub initial: Vec<String>,
    pub deadlines: Vec<(String, u64)>,
    pub sets: Vec<(String, i64)>,
    pub injections: Vec<Injection>,
}

impl SimDirectives {
    pub fn is_empty(&self) -> bool {
        *self == SimDirectives::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub directives: SimDirectives,
}

pub const DEFAULT_MAX_TICKS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown event `{0}` in simulation settings")]
    UnknownEvent(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} is outside the domain of `{name}`")]
    OutOfDomain { name: String, value: i64 },
    #[error("max_ticks must be positive")]
    ZeroTicks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub name: String,
    pub model: StaticModel,
    pub events: Vec<EventDecl>,
    pub variables: Vec<VariableDecl>,
    pub equations: Vec<EquationDecl>,
    pub directives: SimDirectives,
    pub scenarios: Vec<Scenario>,
    pub spans: SpanTable,
}

impl Document {
    pub fn new(name: impl Into<String>, model: StaticModel) -> Self {
        Document {
            name: name.into(),
            model,
            events: Vec::new(),
            variables: Vec::new(),
            equations: Vec::new(),
            directives: SimDirectives::default(),
            scenarios: Vec::new(),
            spans: SpanTable::default(),
        }
    }

    /// All events, each positive one followed by its absence counterpart.
    pub fn event_list(&self) -> Vec<Event> {
        let mut out = Vec::new();
        for d in &self.events {
            out.push(Event {
                id: d.id.clone(),
                description: d.description.clone(),
                region: d.region.clone(),
                polarity: Polarity::Positive,
                is_state: d.is_state,
                repeat: d.repeat,
                counterpart_of: None,
            });
            if let Some(a) = &d.absence {
                out.push(Event {
                    id: a.id.clone(),
                    description: a.description.clone(),
                    region: d.region.clone(),
                    polarity: Polarity::Negative,
                    is_state: false,
                    repeat: a.repeat,
                    counterpart_of: Some(d.id.clone()),
                });
            }
        }
        out
    }

    pub fn event(&self, id: &str) -> Option<Event> {
        self.event_list().into_iter().find(|e| e.id == id)
    }

    pub fn has_event(&self, id: &str) -> bool {
        self.events.iter().any(|e| e.id == id || e.absence.as_ref().is_some_and(|a| a.id == id))
    }

    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn scenario(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }

    /// Simulation settings from the `simulate` block, overlaid with the named
    /// scenario when given.
    pub fn sim_config(&self, scenario: Option<&str>) -> Result<SimConfig, ConfigError> {
        let mut layers = vec![&self.directives];
        if let Some(name) = scenario {
            let s = self.scenario(name).ok_or_else(|| ConfigError::UnknownScenario(name.into()))?;
            layers.push(&s.directives);
        }
        let mut cfg = SimConfig { max_ticks: DEFAULT_MAX_TICKS, ticks_per_minute: 1, ..SimConfig::default() };
        for d in layers {
            if let Some(m) = d.max_ticks {
                cfg.max_ticks = m;
            }
            if let Some(t) = d.ticks_per_minute {
                cfg.ticks_per_minute = t;
            }
            cfg.initial.extend(d.initial.iter().cloned());
            cfg.deadlines.extend(d.deadlines.iter().cloned());
            cfg.exogenous.extend(d.sets.iter().cloned());
            cfg.injections.extend(d.injections.iter().cloned());
        }
        self.check_config(&cfg)?;
        Ok(cfg)
    }

    pub fn check_config(&self, cfg: &SimConfig) -> Result<(), ConfigError> {
        if cfg.max_ticks == 0 {
            return Err(ConfigError::ZeroTicks);
        }
        let events = cfg.initial.iter().chain(cfg.deadlines.keys()).chain(cfg.injections.iter().map(|i| &i.event));
        for e in events {
            if !self.has_event(e) {
                return Err(ConfigError::UnknownEvent(e.clone()));
            }
        }
        for (name, &value) in &cfg.exogenous {
            let v = self.variable(name).ok_or_else(|| ConfigError::UnknownVariable(name.clone()))?;
            if !v.domain.contains(value) {
                return Err(ConfigError::OutOfDomain { name: name.clone(), value });
            }
        }
        Ok(())
    }

    /// Expands the static model and grows every event region along the
    /// chains that replaced arcs internal to it, keeping regions connected.
    pub fn expand(&self) -> Result<Document, ExpandError> {
        let expansion = expand_simplified_traced(&self.model)?;
        let mut doc = self.clone();
        for ev in &mut doc.events {
            let mut elements: Vec<String> = ev.region.elements().to_vec();
            for flow in &self.model.flows {
                if !(ev.region.contains(&flow.source) && ev.region.contains(&flow.target)) {
                    continue;
                }
                let chain = expansion.chain_of(&flow.id).unwrap_or(&[]);
                for arc_id in chain {
                    let arc = expansion.model.flows.iter().find(|f| &f.id == arc_id).expect("chain arc");
                    for n in [&arc.source, &arc.target] {
                        if !elements.contains(n) {
                            elements.push(n.clone());
                        }
                    }
                }
            }
            ev.region =
                crate::model::extract_region(&expansion.model, &elements).expect("expansion keeps regions connected");
        }
        doc.model = expansion.model;
        Ok(doc)
    }
}
