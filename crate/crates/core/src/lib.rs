//! Thinging-machine models as executable artifacts.
//!
//! A TM document has a static level (thimacs with the five actions, joined
//! by flow and trigger arcs) and a dynamic level (events over connected
//! regions of the static model). On top of that sit variables and
//! structural equations. This crate parses the `.tm` text format, validates
//! and expands static models, simulates event actualization on a discrete
//! clock, abstracts documents into causal graphs, judges causal claims over
//! traces, and renders DOT.

pub mod causal;
pub mod document;
pub mod dsl;
pub mod dynamics;
pub mod expand;
pub mod export;
pub mod expr;
pub mod model;

pub use causal::{
    abstract_to_causal_graph, assignment_from_trace, evaluate_equations, judge_causal, Assignment, CausalError,
    CausalGraph, CausalVerdict,
};
pub use document::{Document, Domain};
pub use dsl::{emit, parse, ParseError};
pub use dynamics::{
    build_chronology, check_simultaneous, decompose_event, simulate, Chronology, Event, Polarity, Realization,
    SimConfig, SimError, Trace,
};
pub use expand::{expand_simplified, ExpandError};
pub use export::{to_dot, trace_to_json, View};
pub use model::{extract_region, validate_static, ActionKind, Mode, Region, StaticModel};
