//! Assertions shared by the property and acceptance suites.

use std::collections::BTreeSet;

use tm_core::expand::expand_simplified_traced;
use tm_core::model::Severity;
use tm_core::{
    build_chronology, emit, expand_simplified, parse, validate_static, Document, Mode, Polarity, StaticModel, Trace,
};

pub fn assert_round_trip(doc: &Document) {
    let text = emit(doc);
    let back = parse(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    assert_eq!(&back, doc);
    assert_eq!(emit(&back), text);
}

pub fn assert_polarity_exclusion(doc: &Document, trace: &Trace) {
    for e in doc.event_list().into_iter().filter(|e| e.polarity == Polarity::Negative) {
        let pos = e.counterpart_of.as_deref().unwrap();
        let pos_state = doc.event(pos).unwrap().is_state;
        for n in trace.realizations_of(&e.id) {
            let (a, b) = n.covered(false).unwrap();
            for p in trace.realizations_of(pos) {
                let Some((c, d)) = p.covered(pos_state) else { continue };
                // an open state covers everything from its start on
                let d = if pos_state && p.end.is_none() { u64::MAX } else { d };
                assert!(b < c || d < a, "{}: {} overlaps {}", doc.name, e.id, pos);
            }
        }
    }
}

/// Realizations forced by the configuration rather than propagated.
pub fn forced(trace: &Trace, event: &str, at: u64) -> bool {
    let cfg = &trace.config;
    (at == 0 && cfg.initial.contains(event)) || cfg.injections.iter().any(|i| i.event == event && i.fires_at(at))
}

/// Every propagated realization of an event with chronology predecessors is
/// preceded by (or simultaneous with) a realization in a predecessor's area.
/// Cyclic models have no chronology and are skipped.
pub fn assert_chronology_consistent(doc: &Document, trace: &Trace) {
    let Ok(c) = build_chronology(doc) else { return };
    let area_of = |id: &str| doc.event(id).and_then(|e| e.counterpart_of).unwrap_or_else(|| id.to_string());
    for b in &c.nodes {
        let preds: BTreeSet<&str> = c.edges.iter().filter(|(_, y)| y == b).map(|(x, _)| x.as_str()).collect();
        if preds.is_empty() {
            continue;
        }
        for r in trace.realizations_of(b) {
            if forced(trace, b, r.start) {
                continue;
            }
            let witnessed =
                trace.realizations.iter().any(|s| s.start <= r.start && preds.contains(area_of(&s.event).as_str()));
            assert!(witnessed, "{}: {b} at {} has no predecessor", doc.name, r.start);
        }
    }
}

pub fn flow_closure(model: &StaticModel) -> BTreeSet<(String, String)> {
    model
        .action_nodes()
        .iter()
        .flat_map(|a| model.flow_reachable(&a.id).into_iter().map(|b| (a.id.clone(), b)).collect::<Vec<_>>())
        .collect()
}

pub fn assert_expansion_sound(model: &StaticModel) {
    let exp = expand_simplified_traced(model).unwrap();
    assert!(validate_static(&exp.model).iter().all(|d| d.severity != Severity::Error));
    // every original arrow maps to its own chain from source to target
    let mut used = BTreeSet::new();
    for f in &model.flows {
        let chain = exp.chain_of(&f.id).unwrap();
        assert!(!chain.is_empty());
        let arcs: Vec<_> = chain.iter().map(|id| exp.model.flows.iter().find(|g| &g.id == id).unwrap()).collect();
        assert_eq!(arcs[0].source, f.source);
        assert_eq!(arcs.last().unwrap().target, f.target);
        for w in arcs.windows(2) {
            assert_eq!(w[0].target, w[1].source);
        }
        for id in chain {
            assert!(used.insert(id.clone()), "arc {id} shared by two chains");
        }
    }
    // reachability among original actions is preserved
    let before = flow_closure(model);
    let after = flow_closure(&exp.model);
    for pair in &before {
        assert!(after.contains(pair), "{pair:?} lost");
    }
    // an expanded model expands to itself
    let mut again = exp.model.clone();
    again.mode = Mode::Simplified;
    let twice = expand_simplified(&again).unwrap();
    assert_eq!(twice.thimacs, exp.model.thimacs);
    assert_eq!(twice.flows, exp.model.flows);
}
