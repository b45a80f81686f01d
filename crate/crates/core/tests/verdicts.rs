mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use tm_core::document::VariableDecl;
use tm_core::{abstract_to_causal_graph, judge_causal, parse, CausalError, CausalVerdict, Document, Domain, Trace};

/// Every ordered pair of distinct events, judged on `trace`.
fn all_verdicts(doc: &Document, trace: &Trace) -> Vec<(String, String, CausalVerdict)> {
    let ids: Vec<String> = doc.event_list().into_iter().map(|e| e.id).collect();
    let mut out = Vec::new();
    for a in &ids {
        for b in ids.iter().filter(|b| *b != a) {
            out.push((a.clone(), b.clone(), judge_causal(doc, trace, a, b).unwrap()));
        }
    }
    out
}

#[test]
fn causal_witnesses_are_actual_paths() {
    for name in CORPUS {
        let doc = load(name);
        let arcs: BTreeSet<(&str, &str, &str)> = doc
            .model
            .flows
            .iter()
            .map(|f| (f.id.as_str(), f.source.as_str(), f.target.as_str()))
            .chain(doc.model.triggers.iter().map(|t| (t.id.as_str(), t.source.as_str(), t.target.as_str())))
            .collect();
        for (scenario, trace) in all_runs(&doc) {
            for (cause, effect, v) in all_verdicts(&doc, &trace) {
                let CausalVerdict::Causal { witness } = v else { continue };
                let ctx = format!("{name} {scenario:?} {cause} -> {effect}");
                assert!(!witness.is_empty(), "{ctx}");
                assert!(region_of(&doc, &cause).contains(&witness[0].source), "{ctx}");
                assert!(region_of(&doc, &effect).contains(&witness.last().unwrap().target), "{ctx}");
                for h in &witness {
                    assert!(arcs.contains(&(h.arc.as_str(), h.source.as_str(), h.target.as_str())), "{ctx}: {h:?}");
                }
                for w in witness.windows(2) {
                    assert_eq!(w[0].target, w[1].source, "{ctx}");
                    assert!(w[0].at <= w[1].at, "{ctx}");
                }
                // some cause realization no later than some effect realization
                // brackets the crossings
                let first = witness[0].at;
                let last = witness.last().unwrap().at;
                let cs = trace.realizations_of(&cause).map(|r| r.start).filter(|&s| s <= first).min();
                let es = trace.realizations_of(&effect).map(|r| r.start).filter(|&s| s >= last).max();
                assert!(matches!((cs, es), (Some(c), Some(e)) if c <= e), "{ctx}: {witness:?}");
            }
        }
    }
}

#[test]
fn unrealized_cause_is_not_actualized() {
    for name in CORPUS {
        let doc = load(name);
        for (_, trace) in all_runs(&doc) {
            for (cause, _, v) in all_verdicts(&doc, &trace) {
                let realized = trace.first_start(&cause).is_some();
                assert_eq!(v == CausalVerdict::NotActualized, !realized, "{name} {cause}");
            }
        }
    }
}

#[test]
fn self_causation_is_rejected() {
    let doc = load("firing_squad");
    let trace = run(&doc, None);
    assert_eq!(judge_causal(&doc, &trace, "E3", "E3"), Err(CausalError::SameEvent("E3".into())));
    assert!(matches!(judge_causal(&doc, &trace, "E3", "E99"), Err(CausalError::UnknownEvent(_))));
}

#[test]
fn verdicts_ignore_declaration_order() {
    for name in CORPUS {
        let doc = load(name);
        let mut permuted = doc.clone();
        permuted.events.reverse();
        permuted.variables.reverse();
        permuted.equations.reverse();
        permuted.model.flows.reverse();
        permuted.model.triggers.reverse();
        let scenarios = std::iter::once(None).chain(doc.scenarios.iter().map(|s| Some(s.name.as_str())));
        for scenario in scenarios {
            let a = all_verdicts(&doc, &run(&doc, scenario));
            let mut b = all_verdicts(&permuted, &run(&permuted, scenario));
            let key = |v: &(String, String, CausalVerdict)| (v.0.clone(), v.1.clone());
            b.sort_by_key(key);
            let mut a = a;
            a.sort_by_key(key);
            let names = |v: &[(String, String, CausalVerdict)]| -> Vec<(String, String, &'static str)> {
                v.iter().map(|(c, e, v)| (c.clone(), e.clone(), v.name())).collect()
            };
            assert_eq!(names(&a), names(&b), "{name} {scenario:?}");
        }
    }
}

#[test]
fn mapping_an_intermediate_event_splits_the_edge() {
    let mut doc = load("firing_squad");
    let before: BTreeSet<(String, String)> = abstract_to_causal_graph(&doc).unwrap().edges.into_iter().collect();
    assert!(before.contains(&("CO".into(), "C".into())));
    // E4 carries the order from the court to the captain
    doc.variables.push(VariableDecl { name: "O".into(), domain: Domain::Bool, values: vec![(1, "E4".into())] });
    let after: BTreeSet<(String, String)> = abstract_to_causal_graph(&doc).unwrap().edges.into_iter().collect();
    assert!(after.contains(&("CO".into(), "O".into())), "{after:?}");
    assert!(after.contains(&("O".into(), "C".into())), "{after:?}");
    assert!(!after.contains(&("CO".into(), "C".into())), "{after:?}");
    let untouched: BTreeSet<_> = before.iter().filter(|(a, _)| a != "CO").cloned().collect();
    assert!(untouched.is_subset(&after));
}

#[test]
fn firing_squad_trace_json_shape() {
    let doc = load("firing_squad");
    let trace = run(&doc, None);
    let v: serde_json::Value = serde_json::from_str(&tm_core::trace_to_json(&trace)).unwrap();
    assert_eq!(v["realizations"].as_array().unwrap().len(), 8);
    let mut cfg = config(&doc, None);
    cfg.max_ticks = 1;
    let short = tm_core::simulate(&doc, &cfg).unwrap();
    let v: serde_json::Value = serde_json::from_str(&tm_core::trace_to_json(&short)).unwrap();
    assert_eq!(v["truncated"], true);
}

/// A corpus file with one byte range cut out or replaced.
fn damaged() -> impl Strategy<Value = String> {
    (prop::sample::select(CORPUS.to_vec()), any::<prop::sample::Index>(), 0usize..40, "[ -~\n]{0,3}").prop_map(
        |(name, at, len, patch)| {
            let text = source(name);
            let mut start = at.index(text.len());
            while !text.is_char_boundary(start) {
                start -= 1;
            }
            let mut end = (start + len).min(text.len());
            while !text.is_char_boundary(end) {
                end -= 1;
            }
            format!("{}{patch}{}", &text[..start], &text[end..])
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_errors_point_into_the_input(text in damaged()) {
        if let Err(e) = parse(&text) {
            let s = e.span();
            prop_assert!(s.offset + s.len <= text.len(), "{e}: {s:?}");
            prop_assert!(s.line >= 1 && s.line <= text.lines().count().max(1) + 1, "{e}: {s:?}");
            prop_assert_eq!(parse(&text), Err(e));
        }
    }
}
