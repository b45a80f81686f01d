//! Links between areas of the static model.
//!
//! An area is a set of action nodes (an event region, or the union of the
//! regions mapped to a variable). A link from area `a` to area `b` is an arc
//! path that leaves `a` and enters `b` while crossing only nodes that belong
//! to no area. Terminating triggers end a path: arriving through one at a
//! node of a state area terminates that area instead of entering it.

use std::collections::{BTreeSet, HashMap};

use crate::expr::Expr;
use crate::model::{ArcKind, ArcRef, Delay, StaticModel};

#[derive(Debug, Clone)]
pub(crate) struct Area {
    pub nodes: BTreeSet<String>,
    /// Nodes at which a terminating arrival ends this area rather than entering it.
    pub terminable: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hop {
    pub arc: String,
    pub source: String,
    pub target: String,
    pub kind: ArcKind,
    pub guard: Option<Expr>,
    pub delay: Option<Delay>,
    pub terminates: bool,
}

impl Hop {
    fn from_arc(a: &ArcRef<'_>) -> Self {
        Hop {
            arc: a.id.to_string(),
            source: a.source.to_string(),
            target: a.target.to_string(),
            kind: a.kind,
            guard: a.guard().cloned(),
            delay: a.trigger.and_then(|t| t.delay),
            terminates: a.terminates(),
        }
    }

    pub fn delay_ticks(&self, ticks_per_minute: u64) -> u64 {
        match self.delay {
            Some(d) => d.in_ticks(ticks_per_minute),
            None if self.terminates => 0,
            None => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Link {
    pub from: usize,
    pub to: usize,
    pub hops: Vec<Hop>,
    /// Set for terminations: the path ends the `to` area.
    pub terminates: bool,
}

impl Link {
    pub fn via_trigger(&self) -> bool {
        self.hops.iter().any(|h| h.kind == ArcKind::Trigger)
    }

    pub fn final_arc(&self) -> &str {
        &self.hops.last().expect("non-empty path").arc
    }

    pub fn delay(&self, ticks_per_minute: u64) -> u64 {
        self.hops.iter().map(|h| h.delay_ticks(ticks_per_minute)).sum()
    }

    pub fn guards(&self) -> impl Iterator<Item = &Expr> {
        self.hops.iter().filter_map(|h| h.guard.as_ref())
    }
}

/// All links between areas, in a deterministic order (source area, then node
/// order, then arc declaration order, depth first).
pub(crate) fn links(model: &StaticModel, areas: &[Area]) -> Vec<Link> {
    let out_arcs = model.out_arcs();
    let in_any: BTreeSet<&str> = areas.iter().flat_map(|a| a.nodes.iter().map(String::as_str)).collect();
    let mut found = Vec::new();
    for (ai, area) in areas.iter().enumerate() {
        for node in &area.nodes {
            for arc in out_arcs.get(node.as_str()).into_iter().flatten() {
                let mut path = vec![Hop::from_arc(arc)];
                let mut visited: Vec<&str> = vec![node.as_str()];
                walk(ai, areas, &in_any, &out_arcs, arc, &mut path, &mut visited, &mut found);
            }
        }
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn walk<'m>(
    from: usize,
    areas: &[Area],
    in_any: &BTreeSet<&str>,
    out_arcs: &HashMap<&'m str, Vec<ArcRef<'m>>>,
    arc: &ArcRef<'m>,
    path: &mut Vec<Hop>,
    visited: &mut Vec<&'m str>,
    found: &mut Vec<Link>,
) {
    let v = arc.target;
    let here = &areas[from];
    let mut entered = false;
    if !here.nodes.contains(v) {
        for (bi, b) in areas.iter().enumerate() {
            if bi == from || !b.nodes.contains(v) {
                continue;
            }
            entered = true;
            let terminates = arc.terminates() && b.terminable.contains(v);
            found.push(Link { from, to: bi, hops: path.clone(), terminates });
        }
    }
    if arc.terminates() || entered || in_any.contains(v) || visited.contains(&v) {
        return;
    }
    visited.push(v);
    for next in out_arcs.get(v).into_iter().flatten() {
        path.push(Hop::from_arc(next));
        walk(from, areas, in_any, out_arcs, next, path, visited, found);
        path.pop();
    }
    visited.pop();
}

/// Node-level reachability from any node of `from` to any node of `to`.
/// Terminating triggers are followed to their target but not beyond.
pub(crate) fn region_reaches(model: &StaticModel, from: &BTreeSet<&str>, to: &BTreeSet<&str>) -> bool {
    let out_arcs = model.out_arcs();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut stack: Vec<&str> = from.iter().copied().collect();
    while let Some(n) = stack.pop() {
        for arc in out_arcs.get(n).into_iter().flatten() {
            if to.contains(arc.target) {
                return true;
            }
            if !arc.terminates() && seen.insert(arc.target) {
                stack.push(arc.target);
            }
        }
    }
    false
}
