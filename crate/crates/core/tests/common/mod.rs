#![allow(dead_code)]

pub mod checks;
pub mod gen;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use tm_core::{parse, simulate, Document, SimConfig, Trace};

pub const CORPUS: [&str; 7] = ["firing_squad", "gas_grill", "laptop", "suzy_billy", "knife", "flora", "johnny"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(format!("{name}.tm"))
}

pub fn source(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load(name: &str) -> Document {
    parse(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn config(doc: &Document, scenario: Option<&str>) -> SimConfig {
    doc.sim_config(scenario).unwrap_or_else(|e| panic!("{}: {e}", doc.name))
}

pub fn run(doc: &Document, scenario: Option<&str>) -> Trace {
    simulate(doc, &config(doc, scenario)).unwrap_or_else(|e| panic!("{}: {e}", doc.name))
}

/// The default run plus one per scenario.
pub fn all_runs(doc: &Document) -> Vec<(Option<String>, Trace)> {
    std::iter::once(None)
        .chain(doc.scenarios.iter().map(|s| Some(s.name.clone())))
        .map(|s| {
            let t = run(doc, s.as_deref());
            (s, t)
        })
        .collect()
}

/// (start, end) of every realization of `id`.
pub fn spans(trace: &Trace, id: &str) -> Vec<(u64, Option<u64>)> {
    trace.realizations_of(id).map(|r| (r.start, r.end)).collect()
}

/// Directed adjacency over every flow and trigger arc, by action id.
pub fn arc_graph(doc: &Document) -> BTreeMap<String, Vec<(String, bool)>> {
    let mut g: BTreeMap<String, Vec<(String, bool)>> = BTreeMap::new();
    for f in &doc.model.flows {
        g.entry(f.source.clone()).or_default().push((f.target.clone(), false));
    }
    for t in &doc.model.triggers {
        g.entry(t.source.clone()).or_default().push((t.target.clone(), t.terminates));
    }
    g
}

/// Plain breadth-first reachability along arcs, starting anywhere in `from`.
pub fn reaches(doc: &Document, from: &BTreeSet<String>, to: &BTreeSet<String>) -> bool {
    let g = arc_graph(doc);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<String> = from.iter().cloned().collect();
    while let Some(n) = queue.pop_front() {
        for (m, _) in g.get(&n).into_iter().flatten() {
            if to.contains(m) && !from.contains(m) {
                return true;
            }
            if seen.insert(m.clone()) {
                queue.push_back(m.clone());
            }
        }
    }
    false
}

pub fn region_of(doc: &Document, id: &str) -> BTreeSet<String> {
    let e = doc.event(id).unwrap_or_else(|| panic!("no event {id}"));
    e.region.actions().map(str::to_string).collect()
}
