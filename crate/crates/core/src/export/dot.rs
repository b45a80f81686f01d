use std::collections::BTreeMap;
use std::fmt::Write;

use crate::causal::abstract_to_causal_graph;
use crate::dynamics::{build_chronology, Polarity};
use crate::model::{action_id, StaticModel, Thimac};
use crate::Document;

use super::{ExportError, View};

/// Deterministic DOT ids: non-alphanumerics become `_`, and a name that
/// collides with an earlier one gets an ordinal suffix.
#[derive(Default)]
struct Ids {
    by_name: BTreeMap<String, String>,
    taken: BTreeMap<String, usize>,
}

impl Ids {
    fn get(&mut self, name: &str) -> String {
        if let Some(id) = self.by_name.get(name) {
            return id.clone();
        }
        let mut base: String = name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        if base.is_empty()
            || base.starts_with(|c: char| c.is_ascii_digit())
            || KEYWORDS.contains(&base.to_lowercase().as_str())
        {
            base.insert(0, '_');
        }
        let n = self.taken.entry(base.clone()).or_insert(0);
        *n += 1;
        let mut id = if *n == 1 { base.clone() } else { format!("{base}_{n}") };
        // a suffixed id may itself be a plain name seen later; keep counting
        while self.by_name.values().any(|v| *v == id) {
            *n += 1;
            id = format!("{base}_{n}");
        }
        self.by_name.insert(name.to_string(), id.clone());
        id
    }
}

const KEYWORDS: [&str; 6] = ["node", "edge", "graph", "digraph", "subgraph", "strict"];

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(doc: &Document, view: View) -> Result<String, ExportError> {
    let mut ids = Ids::default();
    let mut out = format!("digraph {} {{\n", escape(&doc.name));
    match view {
        View::Static => {
            out.push_str("    node [shape=box, style=rounded];\n");
            static_body(&mut out, &mut ids, &doc.model, 1);
        }
        View::Dynamic => dynamic(&mut out, &mut ids, doc)?,
        View::Chronology => chronology(&mut out, &mut ids, doc)?,
        View::Causal => causal(&mut out, &mut ids, doc)?,
    }
    out.push_str("}\n");
    Ok(out)
}

fn static_body(out: &mut String, ids: &mut Ids, model: &StaticModel, depth: usize) {
    for root in model.roots() {
        thimac_cluster(out, ids, model, root, depth);
    }
    let pad = "    ".repeat(depth);
    for f in &model.flows {
        let (s, t) = (ids.get(&f.source), ids.get(&f.target));
        let label = f.thing.as_deref().map(|l| format!(", label={}", escape(l))).unwrap_or_default();
        writeln!(out, "{pad}{s} -> {t} [id={}{label}];", escape(&f.id)).unwrap();
    }
    for tr in &model.triggers {
        let (s, t) = (ids.get(&tr.source), ids.get(&tr.target));
        let mut label = Vec::new();
        if let Some(d) = tr.delay {
            label.push(format!("after {}", d.amount));
        }
        if let Some(g) = &tr.guard {
            label.push(format!("when {g}"));
        }
        if tr.terminates {
            label.push("terminates".into());
        }
        let label = if label.is_empty() { String::new() } else { format!(", label={}", escape(&label.join(" "))) };
        writeln!(out, "{pad}{s} -> {t} [id={}, style=dashed{label}];", escape(&tr.id)).unwrap();
    }
}

fn thimac_cluster(out: &mut String, ids: &mut Ids, model: &StaticModel, t: &Thimac, depth: usize) {
    let pad = "    ".repeat(depth);
    let cid = ids.get(&format!("cluster:{}", t.id));
    writeln!(out, "{pad}subgraph {cid} {{").unwrap();
    let label = t.label.as_deref().unwrap_or(&t.name);
    writeln!(out, "{pad}    label={};", escape(label)).unwrap();
    for k in &t.actions {
        let a = action_id(&t.id, *k);
        writeln!(out, "{pad}    {} [label={}, tooltip={}];", ids.get(&a), escape(k.as_str()), escape(&a)).unwrap();
    }
    for c in &t.children {
        if let Some(child) = model.thimac(c) {
            thimac_cluster(out, ids, model, child, depth + 1);
        }
    }
    writeln!(out, "{pad}}}").unwrap();
}

fn dynamic(out: &mut String, ids: &mut Ids, doc: &Document) -> Result<(), ExportError> {
    let events = doc.event_list();
    if events.is_empty() {
        return Err(ExportError::ViewUnavailable("the document declares no events".into()));
    }
    out.push_str("    compound=true;\n");
    let existence = ids.get("cluster:existence");
    let subsistence = ids.get("cluster:subsistence");
    writeln!(out, "    subgraph {existence} {{\n        label=\"existence\";").unwrap();
    for e in &events {
        let cid = ids.get(&format!("cluster:event:{}", e.id));
        let style = match e.polarity {
            Polarity::Positive => "style=filled, fillcolor=\"#fde2e4\"",
            Polarity::Negative => "style=dotted",
        };
        writeln!(out, "        subgraph {cid} {{").unwrap();
        writeln!(out, "            graph [{style}];").unwrap();
        writeln!(out, "            label={};", escape(&e.description)).unwrap();
        let kind = if e.is_state { "box" } else { "ellipse" };
        writeln!(out, "            {} [label={}, shape={kind}];", ids.get(&format!("event:{}", e.id)), escape(&e.id))
            .unwrap();
        out.push_str("        }\n");
    }
    out.push_str("    }\n");
    writeln!(out, "    subgraph {subsistence} {{\n        label=\"subsistence\";").unwrap();
    out.push_str("        node [shape=box, style=rounded];\n");
    static_body(out, ids, &doc.model, 2);
    out.push_str("    }\n");
    for e in &events {
        let from = ids.get(&format!("event:{}", e.id));
        for a in e.region.actions() {
            writeln!(out, "    {from} -> {} [color=gray, style=bold, arrowhead=none];", ids.get(a)).unwrap();
        }
    }
    Ok(())
}

fn chronology(out: &mut String, ids: &mut Ids, doc: &Document) -> Result<(), ExportError> {
    let c = build_chronology(doc).map_err(|e| ExportError::ViewUnavailable(e.to_string()))?;
    out.push_str("    node [shape=ellipse];\n");
    for n in &c.nodes {
        writeln!(out, "    {} [label={}];", ids.get(n), escape(n)).unwrap();
    }
    for (a, b) in &c.edges {
        writeln!(out, "    {} -> {};", ids.get(a), ids.get(b)).unwrap();
    }
    for g in &c.groups {
        let members: Vec<String> = g.iter().map(|m| ids.get(m)).collect();
        writeln!(out, "    {{ rank=same; {}; }}", members.join("; ")).unwrap();
    }
    Ok(())
}

fn causal(out: &mut String, ids: &mut Ids, doc: &Document) -> Result<(), ExportError> {
    let g = abstract_to_causal_graph(doc).map_err(|e| ExportError::ViewUnavailable(e.to_string()))?;
    out.push_str("    node [shape=circle];\n");
    for v in &g.variables {
        let tooltip = g
            .equations
            .iter()
            .find(|e| e.target == v.name)
            .map(|e| format!(", tooltip={}", escape(&format!("{} = {}", e.target, e.body))))
            .unwrap_or_default();
        writeln!(out, "    {} [label={}{tooltip}];", ids.get(&v.name), escape(&v.name)).unwrap();
    }
    for (a, b) in &g.edges {
        writeln!(out, "    {} -> {};", ids.get(a), ids.get(b)).unwrap();
    }
    Ok(())
}
