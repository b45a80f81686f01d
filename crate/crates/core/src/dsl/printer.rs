use std::fmt::Write;

use super::RESERVED;
use crate::document::{Document, Domain, SimDirectives};
use crate::model::{DelayUnit, StaticModel, Thimac};

const INDENT: &str = "    ";

/// Canonical text for `doc`. Sections come in a fixed order (thimacs, flows,
/// triggers, events, variables, equations, simulate, scenarios); each keeps
/// declaration order.
pub fn emit(doc: &Document) -> String {
    let mut sections: Vec<String> = vec![format!("model {} {}\n", doc.name, doc.model.mode.as_str())];

    let mut s = String::new();
    for root in doc.model.roots() {
        thimac(&mut s, &doc.model, root, 0);
    }
    sections.push(s);

    let mut s = String::new();
    for f in &doc.model.flows {
        write!(s, "flow {} -> {}", f.source, f.target).unwrap();
        if let Some(t) = &f.thing {
            write!(s, " carrying {}", word(t)).unwrap();
        }
        s.push('\n');
    }
    sections.push(s);

    let mut s = String::new();
    for t in &doc.model.triggers {
        write!(s, "trigger {} ~> {}", t.source, t.target).unwrap();
        if let Some(d) = t.delay {
            let unit = match d.unit {
                DelayUnit::Ticks => "ticks",
                DelayUnit::Minutes => "minutes",
            };
            write!(s, " after {} {unit}", d.amount).unwrap();
        }
        if let Some(g) = &t.guard {
            write!(s, " when {g}").unwrap();
        }
        if t.terminates {
            s.push_str(" terminates");
        }
        s.push('\n');
    }
    sections.push(s);

    let mut s = String::new();
    for e in &doc.events {
        write!(s, "event {} {} region {{ {} }}", e.id, quote(&e.description), e.region.elements().join(", ")).unwrap();
        if e.is_state {
            s.push_str(" state");
        }
        if let Some(r) = e.repeat {
            write!(s, " repeat {r}").unwrap();
        }
        if let Some(a) = &e.absence {
            write!(s, "\n{INDENT}absence {} {}", a.id, quote(&a.description)).unwrap();
            if let Some(r) = a.repeat {
                write!(s, " repeat {r}").unwrap();
            }
        }
        s.push('\n');
    }
    sections.push(s);

    let mut s = String::new();
    for v in &doc.variables {
        let domain = match v.domain {
            Domain::Bool => "bool".to_string(),
            Domain::Int { lo, hi } => format!("int {lo}..{hi}"),
        };
        let values: Vec<String> = v
            .values
            .iter()
            .map(|(value, ev)| match (v.domain, value) {
                (Domain::Bool, 1) => format!("true: {ev}"),
                (Domain::Bool, 0) => format!("false: {ev}"),
                _ => format!("{value}: {ev}"),
            })
            .collect();
        writeln!(s, "variable {} {domain} {{ {} }}", v.name, values.join(", ")).unwrap();
    }
    sections.push(s);

    let mut s = String::new();
    for e in &doc.equations {
        writeln!(s, "equation {} = {}", e.target, e.body).unwrap();
    }
    sections.push(s);

    if !doc.directives.is_empty() {
        sections.push(block("simulate", &doc.directives));
    }
    for sc in &doc.scenarios {
        sections.push(block(&format!("scenario {}", sc.name), &sc.directives));
    }

    sections.retain(|s| !s.is_empty());
    sections.join("\n")
}

fn thimac(out: &mut String, model: &StaticModel, t: &Thimac, depth: usize) {
    let pad = INDENT.repeat(depth);
    write!(out, "{pad}thimac {}", t.name).unwrap();
    if let Some(l) = &t.label {
        write!(out, " {}", quote(l)).unwrap();
    }
    if t.actions.is_empty() && t.children.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    if !t.actions.is_empty() {
        let kinds: Vec<&str> = t.actions.iter().map(|k| k.as_str()).collect();
        writeln!(out, "{pad}{INDENT}actions: {}", kinds.join(", ")).unwrap();
    }
    for c in &t.children {
        if let Some(child) = model.thimac(c) {
            thimac(out, model, child, depth + 1);
        }
    }
    writeln!(out, "{pad}}}").unwrap();
}

fn block(header: &str, d: &SimDirectives) -> String {
    let mut s = format!("{header} {{\n");
    if let Some(m) = d.max_ticks {
        writeln!(s, "{INDENT}max_ticks: {m}").unwrap();
    }
    if let Some(t) = d.ticks_per_minute {
        writeln!(s, "{INDENT}ticks_per_minute: {t}").unwrap();
    }
    if !d.initial.is_empty() {
        writeln!(s, "{INDENT}initial: {{ {} }}", d.initial.join(", ")).unwrap();
    }
    for (e, t) in &d.deadlines {
        writeln!(s, "{INDENT}deadline {e}: {t}").unwrap();
    }
    for (n, v) in &d.sets {
        writeln!(s, "{INDENT}set {n} = {v}").unwrap();
    }
    for i in &d.injections {
        write!(s, "{INDENT}inject {}: {}", i.event, i.at).unwrap();
        if let Some(p) = i.every {
            write!(s, " every {p}").unwrap();
        }
        s.push('\n');
    }
    s.push_str("}\n");
    s
}

fn word(s: &str) -> String {
    let plain = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&s);
    if plain {
        s.to_string()
    } else {
        quote(s)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
