//! Random well-formed documents for property tests.

use proptest::prelude::*;
use tm_core::document::{AbsenceDecl, EquationDecl, EventDecl, VariableDecl};
use tm_core::expr::{BinOp, Expr};
use tm_core::model::Delay;
use tm_core::{extract_region, ActionKind, Document, Domain, Mode, StaticModel};

/// Anchor node, optional flow to span, state, has absence, repeat.
type EventShape = (usize, Option<usize>, bool, bool, Option<u32>);

#[derive(Debug, Clone)]
pub struct Shape {
    nested: Vec<bool>,
    kinds: Vec<[bool; 5]>,
    labels: Vec<bool>,
    flows: Vec<(usize, usize, Option<usize>)>,
    triggers: Vec<(usize, usize, Option<u64>, bool, bool)>,
    events: Vec<EventShape>,
    vars: usize,
    max_ticks: u64,
    initial: Vec<bool>,
    deadlines: Vec<u64>,
    sets: Vec<bool>,
}

const THINGS: [&str; 3] = ["water", "signal", "hot gas"];

fn shape() -> impl Strategy<Value = Shape> {
    (2usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<[bool; 5]>(), n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0usize..20, 0usize..20, prop::option::of(0usize..3)), 0..8),
            prop::collection::vec(
                (0usize..20, 0usize..20, prop::option::of(0u64..3), any::<bool>(), any::<bool>()),
                0..4,
            ),
            prop::collection::vec(
                (0usize..20, prop::option::of(0usize..8), any::<bool>(), any::<bool>(), prop::option::of(1u32..3)),
                1..6,
            ),
            0usize..4,
            1u64..25,
            prop::collection::vec(any::<bool>(), 6),
            prop::collection::vec(0u64..8, 6),
            prop::collection::vec(any::<bool>(), 4),
        )
            .prop_map(
                |(nested, kinds, labels, flows, triggers, events, vars, max_ticks, initial, deadlines, sets)| Shape {
                    nested,
                    kinds,
                    labels,
                    flows,
                    triggers,
                    events,
                    vars,
                    max_ticks,
                    initial,
                    deadlines,
                    sets,
                },
            )
    })
}

fn build(s: &Shape) -> Document {
    let mut model = StaticModel::new(Mode::Simplified);
    // children of M0 come right after it so declaration stays pre-order
    let n = s.kinds.len();
    let mut order: Vec<usize> = vec![0];
    order.extend((1..n).filter(|&i| s.nested[i]));
    order.extend((1..n).filter(|&i| !s.nested[i]));
    for i in order {
        let path = if i > 0 && s.nested[i] { format!("M0.C{i}") } else { format!("M{i}") };
        let mut kinds: Vec<ActionKind> =
            ActionKind::ALL.iter().zip(s.kinds[i]).filter(|(_, on)| *on).map(|(k, _)| *k).collect();
        if kinds.is_empty() {
            kinds.push(ActionKind::ALL[i % 5]);
        }
        let t = model.add_thimac(&path, &kinds);
        if s.labels[i] {
            t.label = Some(format!("machine {i}"));
        }
    }
    let nodes: Vec<(String, ActionKind)> = model.action_nodes().into_iter().map(|a| (a.id, a.kind)).collect();
    let node = |i: usize| nodes[i % nodes.len()].clone();

    for &(a, b, thing) in &s.flows {
        let ((src, _), (tgt, _)) = (node(a), node(b));
        if src != tgt {
            model.add_flow(&src, &tgt, thing.map(|t| THINGS[t]));
        }
    }

    let mut doc = Document::new("generated", model.clone());
    for (i, &(a, via, state, absence, repeat)) in s.events.iter().enumerate() {
        let (start, _) = node(a);
        let mut ids = vec![start.clone()];
        if let Some(f) = via.and_then(|f| model.flows.get(f)) {
            ids = vec![f.source.clone(), f.target.clone()];
        }
        let region = extract_region(&model, &ids).expect("connected by construction");
        doc.events.push(EventDecl {
            id: format!("E{i}"),
            description: format!("event {i}"),
            region,
            is_state: state,
            repeat: if state { None } else { repeat },
            absence: absence.then(|| AbsenceDecl {
                id: format!("N{i}"),
                description: format!("no event {i}"),
                repeat: repeat.filter(|_| i % 2 == 0),
            }),
        });
    }

    let vars = s.vars.min(doc.events.len());
    for v in 0..vars {
        let e = &doc.events[v];
        let mut values = vec![(1, e.id.clone())];
        if let Some(a) = &e.absence {
            values.push((0, a.id.clone()));
        }
        doc.variables.push(VariableDecl { name: format!("V{v}"), domain: Domain::Bool, values });
    }
    for v in 1..vars {
        let body = Expr::binary(BinOp::Or, Expr::name(format!("V{}", v - 1)), Expr::name("V0"));
        doc.equations.push(EquationDecl { target: format!("V{v}"), body });
    }

    for &(a, b, delay, guarded, term) in &s.triggers {
        let ((src, _), (tgt, kind)) = (node(a), node(b));
        if src == tgt {
            continue;
        }
        let terminable = kind == ActionKind::Create && doc.events.iter().any(|e| e.is_state && e.region.contains(&tgt));
        let t = doc.model.add_trigger(&src, &tgt);
        t.delay = delay.map(Delay::ticks);
        if guarded && vars > 0 {
            t.guard = Some(Expr::binary(BinOp::Eq, Expr::name("V0"), Expr::Int(1)));
        }
        t.terminates = term && terminable;
    }

    let d = &mut doc.directives;
    d.max_ticks = Some(s.max_ticks);
    for (i, e) in doc.events.iter().enumerate() {
        if s.initial[i % s.initial.len()] {
            d.initial.push(e.id.clone());
        }
        if let Some(a) = &e.absence {
            d.deadlines.push((a.id.clone(), s.deadlines[i % s.deadlines.len()]));
        }
    }
    for v in 0..vars {
        d.sets.push((format!("V{v}"), i64::from(s.sets[v])));
    }
    doc
}

pub fn document() -> impl Strategy<Value = Document> {
    shape().prop_map(|s| build(&s))
}
