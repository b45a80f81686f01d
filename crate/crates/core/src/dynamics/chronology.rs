use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::links::{links, Area};
use super::{Event, Polarity};
use crate::Document;

/// Precedence over positive events with simultaneity groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chronology {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    /// Groups of two or more simultaneous events.
    pub groups: Vec<Vec<String>>,
}

impl Chronology {
    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.edges.iter().any(|(x, y)| x == a && y == b)
    }

    pub fn group_of(&self, e: &str) -> Option<&[String]> {
        self.groups.iter().find(|g| g.iter().any(|x| x == e)).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChronologyError {
    #[error("event precedence is cyclic through {}", .0.join(" -> "))]
    CyclicChronology(Vec<String>),
}

pub(crate) fn positive_areas(doc: &Document) -> (Vec<Event>, Vec<Area>) {
    let events: Vec<Event> = doc.event_list().into_iter().filter(|e| e.polarity == Polarity::Positive).collect();
    let areas = events
        .iter()
        .map(|e| {
            let nodes: BTreeSet<String> = e.region.actions().map(str::to_string).collect();
            let terminable = if e.is_state { nodes.clone() } else { BTreeSet::new() };
            Area { nodes, terminable }
        })
        .collect();
    (events, areas)
}

/// Edges as index pairs, deduplicated, sorted.
pub(crate) fn precedence(doc: &Document) -> (Vec<Event>, Vec<(usize, usize)>) {
    let (events, areas) = positive_areas(doc);
    let set: BTreeSet<(usize, usize)> =
        links(&doc.model, &areas).into_iter().filter(|l| !l.terminates).map(|l| (l.from, l.to)).collect();
    (events, set.into_iter().collect())
}

pub fn build_chronology(doc: &Document) -> Result<Chronology, ChronologyError> {
    let (events, edges) = precedence(doc);
    let n = events.len();
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in &edges {
        succ[a].push(b);
    }
    if let Some(cycle) = find_cycle(&succ) {
        return Err(ChronologyError::CyclicChronology(cycle.into_iter().map(|i| events[i].id.clone()).collect()));
    }

    // reach[a][b]: b reachable from a through precedence
    let mut reach = vec![vec![false; n]; n];
    for &(a, b) in &edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (cell, &v) in row.iter_mut().zip(&via) {
                *cell |= v;
            }
        }
    }
    let related = |a: usize, b: usize| reach[a][b] || reach[b][a];

    let mut group_of: Vec<Option<usize>> = vec![None; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for siblings in &succ {
        for (i, &x) in siblings.iter().enumerate() {
            for &y in &siblings[i + 1..] {
                if related(x, y) {
                    continue;
                }
                let members: Vec<usize> = match (group_of[x], group_of[y]) {
                    (Some(g), Some(h)) if g == h => continue,
                    (Some(g), Some(h)) => groups[g].iter().chain(&groups[h]).copied().collect(),
                    (Some(g), None) => groups[g].iter().copied().chain([y]).collect(),
                    (None, Some(h)) => groups[h].iter().copied().chain([x]).collect(),
                    (None, None) => vec![x, y],
                };
                // a group must stay free of internal precedence
                let clean = members.iter().all(|&a| members.iter().all(|&b| a == b || !related(a, b)));
                if !clean {
                    continue;
                }
                let target = group_of[x].or(group_of[y]).unwrap_or_else(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                for g in [group_of[x], group_of[y]].into_iter().flatten() {
                    if g != target {
                        groups[g].clear();
                    }
                }
                let mut members = members;
                members.sort_unstable();
                members.dedup();
                for &m in &members {
                    group_of[m] = Some(target);
                }
                groups[target] = members;
            }
        }
    }

    let id = |i: usize| events[i].id.clone();
    Ok(Chronology {
        nodes: events.iter().map(|e| e.id.clone()).collect(),
        edges: edges.iter().map(|&(a, b)| (id(a), id(b))).collect(),
        groups: groups.into_iter().filter(|g| g.len() > 1).map(|g| g.into_iter().map(id).collect()).collect(),
    })
}

fn find_cycle(succ: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(v: usize, succ: &[Vec<usize>], mark: &mut [Mark], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        mark[v] = Mark::Active;
        stack.push(v);
        for &w in &succ[v] {
            match mark[w] {
                Mark::Active => {
                    let pos = stack.iter().position(|&x| x == w).expect("on stack");
                    let mut cycle = stack[pos..].to_vec();
                    cycle.push(w);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(w, succ, mark, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        mark[v] = Mark::Done;
        None
    }
    let mut mark = vec![Mark::New; succ.len()];
    for v in 0..succ.len() {
        if mark[v] == Mark::New {
            if let Some(c) = visit(v, succ, &mut mark, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}
