mod common;

use common::*;
use tm_core::dynamics::Polarity;
use tm_core::model::action_id;
use tm_core::{emit, parse, to_dot, View};

const VIEWS: [View; 4] = [View::Static, View::Dynamic, View::Chronology, View::Causal];

fn count(hay: &str, needle: &str) -> usize {
    hay.matches(needle).count()
}

#[test]
fn rendering_is_pure() {
    for name in CORPUS {
        let doc = load(name);
        let reparsed = parse(&emit(&doc)).unwrap();
        for view in VIEWS {
            let a = to_dot(&doc, view);
            assert_eq!(a, to_dot(&doc, view), "{name} {view:?}");
            assert_eq!(a, to_dot(&reparsed, view), "{name} {view:?}");
        }
    }
}

#[test]
fn static_view_declares_each_element_once() {
    for name in CORPUS {
        let doc = load(name);
        let dot = to_dot(&doc, View::Static).unwrap();
        for a in doc.model.thimacs.iter().flat_map(|t| t.actions.iter().map(|k| action_id(&t.id, *k))) {
            assert_eq!(count(&dot, &format!("tooltip=\"{a}\"]")), 1, "{name} {a}");
        }
        for t in &doc.model.thimacs {
            let label = t.label.as_deref().unwrap_or(&t.name);
            assert!(dot.contains(&format!("label=\"{label}\";")), "{name} {}", t.id);
        }
        let cluster_count = count(&dot, "subgraph ");
        assert_eq!(cluster_count, doc.model.thimacs.len(), "{name}");
        for f in &doc.model.flows {
            assert_eq!(count(&dot, &format!("[id=\"{}\"", f.id)), 1, "{name} {}", f.id);
        }
        for t in &doc.model.triggers {
            assert_eq!(count(&dot, &format!("[id=\"{}\"", t.id)), 1, "{name} {}", t.id);
        }
    }
}

#[test]
fn dashes_mark_exactly_the_triggers() {
    for name in CORPUS {
        let doc = load(name);
        for view in [View::Static, View::Dynamic] {
            let dot = to_dot(&doc, view).unwrap();
            let dashed: Vec<&str> = dot.lines().filter(|l| l.contains("style=dashed")).collect();
            assert_eq!(dashed.len(), doc.model.triggers.len(), "{name} {view:?}");
            for t in &doc.model.triggers {
                assert!(dashed.iter().any(|l| l.contains(&format!("[id=\"{}\"", t.id))), "{name} {}", t.id);
            }
        }
    }
}

#[test]
fn dotted_clusters_are_exactly_the_absences() {
    for name in CORPUS {
        let doc = load(name);
        let dot = to_dot(&doc, View::Dynamic).unwrap();
        let lines: Vec<&str> = dot.lines().collect();
        let events = doc.event_list();
        let mut dotted = 0;
        for e in &events {
            // the cluster header, then its style line
            let at = lines
                .iter()
                .position(|l| {
                    l.trim_start().starts_with("subgraph ") && l.contains(&format!("cluster_event_{} {{", e.id))
                })
                .unwrap_or_else(|| panic!("{name}: no cluster for {}", e.id));
            let is_dotted = lines[at + 1].contains("style=dotted");
            assert_eq!(is_dotted, e.polarity == Polarity::Negative, "{name} {}", e.id);
            dotted += usize::from(is_dotted);
            assert_eq!(count(&dot, &format!("[label=\"{}\", shape=", e.id)), 1, "{name} {}", e.id);
        }
        assert_eq!(count(&dot, "style=dotted"), dotted, "{name}");
    }
}

#[test]
fn chronology_and_causal_views_list_each_node_once() {
    for name in CORPUS {
        let doc = load(name);
        let c = tm_core::build_chronology(&doc).unwrap();
        let dot = to_dot(&doc, View::Chronology).unwrap();
        for n in &c.nodes {
            assert_eq!(count(&dot, &format!("[label=\"{n}\"]")), 1, "{name} {n}");
        }
        assert_eq!(count(&dot, "rank=same"), c.groups.len(), "{name}");
        if doc.variables.is_empty() {
            continue;
        }
        let dot = to_dot(&doc, View::Causal).unwrap();
        for v in &doc.variables {
            assert_eq!(count(&dot, &format!("[label=\"{}\"", v.name)), 1, "{name} {}", v.name);
        }
        assert_eq!(count(&dot, " -> "), tm_core::abstract_to_causal_graph(&doc).unwrap().edges.len());
    }
}
