mod common;

use common::*;
use tm_core::causal::CausalGraph;
use tm_core::{
    abstract_to_causal_graph, assignment_from_trace, evaluate_equations, judge_causal, Assignment, CausalVerdict,
};

#[test]
fn corpus_parses() {
    let expected_events = [
        ("firing_squad", 8),
        ("gas_grill", 15),
        ("laptop", 5),
        ("suzy_billy", 3),
        ("knife", 3),
        ("flora", 3),
        ("johnny", 5),
    ];
    for (name, n) in expected_events {
        let doc = load(name);
        assert_eq!(doc.events.len(), n, "{name}");
    }
    assert_eq!(load("gas_grill").equations.len(), 3);
}

#[test]
fn firing_squad_order_given() {
    let doc = load("firing_squad");
    let t = run(&doc, None);
    assert_eq!(spans(&t, "E1"), vec![(0, Some(6))]);
    for (id, at) in [("E2", 0), ("E3", 1), ("E4", 2), ("E5", 3), ("E6A", 4), ("E6B", 4)] {
        assert_eq!(spans(&t, id), vec![(at, Some(at))], "{id}");
    }
    assert_eq!(spans(&t, "E7"), vec![(6, None)]);
    assert!(!t.truncated);
}

#[test]
fn firing_squad_order_withheld() {
    let doc = load("firing_squad");
    let t = run(&doc, Some("no_order"));
    assert_eq!(spans(&t, "E1"), vec![(0, None)]);
    for id in ["E3", "E4", "E5", "E6A", "E6B", "E7"] {
        assert!(!t.is_realized(id), "{id}");
    }
    for id in ["no_order", "no_signal", "a_holds", "b_holds", "survives"] {
        assert_eq!(spans(&t, id), vec![(20, Some(20))], "{id}");
    }
}

#[test]
fn firing_squad_equations_agree_with_simulation() {
    let doc = load("firing_squad");
    let g = abstract_to_causal_graph(&doc).unwrap();
    for (scenario, co) in [(None, 1), (Some("no_order"), 0)] {
        let observed = assignment_from_trace(&doc, &run(&doc, scenario)).unwrap();
        let computed = evaluate_equations(&g, &Assignment::new().with("CO", co)).unwrap();
        assert!(observed.complete);
        assert_eq!(observed.values, computed.values, "CO={co}");
    }
}

#[test]
fn suzy_billy_assignment_and_verdicts() {
    let doc = load("suzy_billy");
    let t = run(&doc, None);
    let a = assignment_from_trace(&doc, &t).unwrap();
    assert_eq!((a.get("S"), a.get("W"), a.get("BT")), (Some(1), Some(1), Some(0)));
    assert!(judge_causal(&doc, &t, "suzy_throws", "window_breaks").unwrap().is_causal());
    assert_eq!(judge_causal(&doc, &t, "billy_holds", "window_breaks").unwrap(), CausalVerdict::NotActualized);
}

#[test]
fn knife_capacities() {
    let doc = load("knife");
    let sharp = run(&doc, Some("sharp"));
    assert!(judge_causal(&doc, &sharp, "cut_attempt", "meat_cut").unwrap().is_causal());
    let dull = run(&doc, Some("dull"));
    assert!(!dull.is_realized("meat_cut"));
    match judge_causal(&doc, &dull, "cut_attempt", "meat_uncut").unwrap() {
        CausalVerdict::ChronologicalOnly { failed_guard } => {
            assert!(failed_guard.unwrap().contains("Sharp"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn flora_neglect_and_care() {
    let doc = load("flora");
    let t = run(&doc, None);
    assert_eq!(spans(&t, "no_watering"), vec![(6, Some(6))]);
    assert_eq!(spans(&t, "alive"), vec![(0, Some(6))]);
    assert_eq!(spans(&t, "die"), vec![(6, Some(6))]);
    match judge_causal(&doc, &t, "no_watering", "die").unwrap() {
        CausalVerdict::Causal { witness } => {
            let last = witness.last().unwrap();
            assert!(doc.model.triggers.iter().any(|tr| tr.id == last.arc && tr.terminates));
        }
        other => panic!("{other:?}"),
    }
    let cared = run(&doc, Some("watering"));
    assert_eq!(spans(&cared, "alive"), vec![(0, None)]);
    assert!(!cared.is_realized("no_watering"));
    assert!(!cared.is_realized("die"));
}

#[test]
fn johnny_alternatives() {
    let doc = load("johnny");
    let early = run(&doc, Some("ending_earlier"));
    assert_eq!(spans(&early, "reading_brief"), vec![(1, Some(2))]);
    assert_eq!(spans(&early, "turn_off_gas"), vec![(3, Some(3))]);
    assert_eq!(spans(&early, "gas_on"), vec![(0, Some(3))]);
    assert!(!early.is_realized("gas_left_on"));

    let long = run(&doc, Some("longer_reading"));
    assert_eq!(spans(&long, "reading_long"), vec![(1, Some(6))]);
    assert_eq!(spans(&long, "gas_on"), vec![(0, None)]);
    assert!(!long.is_realized("turn_off_gas"));
    assert_eq!(spans(&long, "gas_left_on"), vec![(10, Some(10))]);
}

#[test]
fn laptop_timeouts() {
    let doc = load("laptop");
    let idle = run(&doc, None);
    assert_eq!(spans(&idle, "screen_on"), vec![(0, Some(5))]);
    assert_eq!(spans(&idle, "screen_off"), vec![(5, None)]);
    assert_eq!(spans(&idle, "sleep"), vec![(15, None)]);

    let active = run(&doc, Some("active"));
    assert_eq!(spans(&active, "screen_on"), vec![(0, Some(5)), (7, Some(12))]);
    assert_eq!(spans(&active, "screen_off"), vec![(5, Some(7)), (12, None)]);
    assert_eq!(spans(&active, "sleep"), vec![(22, None)]);
}

#[test]
fn gas_grill_run() {
    let doc = load("gas_grill");
    let t = run(&doc, None);
    assert_eq!(spans(&t, "E14"), vec![(5, Some(5))]);
    let a = assignment_from_trace(&doc, &t).unwrap();
    assert_eq!(a.get("Meat_cooked"), Some(2));
    let high = run(&doc, Some("high"));
    assert!(high.is_realized("E15"));
}

#[test]
fn eval_without_abstraction() {
    let doc = load("gas_grill");
    let g = CausalGraph::from_equations(doc.variables.clone(), doc.equations.clone());
    let exo: Assignment = [("Gas_connected", 1), ("Gas_knob", 3), ("Igniter", 1), ("Meat_on", 1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    assert_eq!(evaluate_equations(&g, &exo).unwrap().get("Meat_cooked"), Some(3));
}
