//! DOT rendering of the four views and JSON for traces.

mod dot;

use std::fmt;
use std::str::FromStr;

use crate::dynamics::Trace;

pub use dot::to_dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    /// Thimacs, actions, flows and triggers.
    Static,
    /// Event regions over the static model.
    Dynamic,
    Chronology,
    Causal,
}

impl View {
    pub const ALL: [View; 4] = [View::Static, View::Dynamic, View::Chronology, View::Causal];

    pub fn as_str(self) -> &'static str {
        match self {
            View::Static => "static",
            View::Dynamic => "dynamic",
            View::Chronology => "chronology",
            View::Causal => "causal",
        }
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        View::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| format!("unknown view `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("view unavailable: {0}")]
    ViewUnavailable(String),
}

/// Pretty JSON with keys in declaration order.
pub fn trace_to_json(trace: &Trace) -> String {
    serde_json::to_string_pretty(trace).expect("traces always serialize")
}

pub fn trace_from_json(text: &str) -> Result<Trace, serde_json::Error> {
    serde_json::from_str(text)
}
