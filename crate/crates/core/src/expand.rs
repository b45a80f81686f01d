//! Expansion of simplified-notation models into full models.
//!
//! A simplified arrow may join any two actions. Expansion replaces it with a
//! chain of legal steps: inside the source thimac up to its Transfer, one
//! Transfer→Transfer hop, then inside the target thimac from Transfer down to
//! the target action. Missing actions are inserted; existing ones are reused.

use std::collections::VecDeque;

use crate::model::{action_id, legal_step, split_action_id, ActionKind, FlowArc, Mode, StaticModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("model is already in full notation")]
    AlreadyFull,
}

/// An expanded model plus, for every original flow arc, the ids of the arcs
/// that replaced it (in chain order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub model: StaticModel,
    pub chains: Vec<(String, Vec<String>)>,
}

impl Expansion {
    pub fn chain_of(&self, original: &str) -> Option<&[String]> {
        self.chains.iter().find(|(id, _)| id == original).map(|(_, c)| c.as_slice())
    }
}

pub fn expand_simplified(model: &StaticModel) -> Result<StaticModel, ExpandError> {
    expand_simplified_traced(model).map(|e| e.model)
}

pub fn expand_simplified_traced(model: &StaticModel) -> Result<Expansion, ExpandError> {
    if model.mode == Mode::Full {
        return Err(ExpandError::AlreadyFull);
    }
    let mut out = model.clone();
    out.mode = Mode::Full;
    out.flows.clear();

    let mut chains = Vec::with_capacity(model.flows.len());
    for flow in &model.flows {
        let path = match (split_action_id(&flow.source), split_action_id(&flow.target)) {
            (Some(src), Some(tgt)) => step_path(src, tgt),
            _ => vec![flow.source.clone(), flow.target.clone()],
        };
        for node in &path {
            if let Some((owner, kind)) = split_action_id(node) {
                if let Some(t) = out.thimacs.iter_mut().find(|t| t.id == owner) {
                    if !t.actions.contains(&kind) {
                        t.actions.push(kind);
                    }
                }
            }
        }
        let mut ids = Vec::with_capacity(path.len() - 1);
        for pair in path.windows(2) {
            let id = format!("F{}", out.flows.len() + 1);
            out.flows.push(FlowArc {
                id: id.clone(),
                source: pair[0].clone(),
                target: pair[1].clone(),
                thing: flow.thing.clone(),
            });
            ids.push(id);
        }
        chains.push((flow.id.clone(), ids));
    }
    Ok(Expansion { model: out, chains })
}

/// Action ids from source to target, both inclusive, every step legal.
fn step_path((src_owner, src_kind): (&str, ActionKind), (tgt_owner, tgt_kind): (&str, ActionKind)) -> Vec<String> {
    if src_owner == tgt_owner {
        return kind_path(src_kind, tgt_kind).into_iter().map(|k| action_id(src_owner, k)).collect();
    }
    let outbound = kind_path(src_kind, ActionKind::Transfer);
    let inbound = kind_path(ActionKind::Transfer, tgt_kind);
    outbound
        .into_iter()
        .map(|k| action_id(src_owner, k))
        .chain(inbound.into_iter().map(|k| action_id(tgt_owner, k)))
        .collect()
}

/// Shortest chain of legal intra-thimac steps from `from` to `to`. A kind
/// reaches itself with the empty chain only when `from == to` is Transfer on
/// the boundary; otherwise at least one step is taken.
fn kind_path(from: ActionKind, to: ActionKind) -> Vec<ActionKind> {
    if from == to && to == ActionKind::Transfer {
        return vec![from];
    }
    let mut prev: [Option<ActionKind>; 5] = [None; 5];
    let idx = |k: ActionKind| ActionKind::ALL.iter().position(|&x| x == k).expect("kind");
    let mut queue = VecDeque::from([from]);
    let mut reached = false;
    'search: while let Some(cur) = queue.pop_front() {
        for next in ActionKind::ALL {
            if !legal_step(cur, next, true) || prev[idx(next)].is_some() {
                continue;
            }
            prev[idx(next)] = Some(cur);
            if next == to {
                reached = true;
                break 'search;
            }
            queue.push_back(next);
        }
    }
    assert!(reached, "legal step graph is strongly connected");
    let mut path = vec![to];
    let mut cur = to;
    loop {
        let p = prev[idx(cur)].expect("on path");
        path.push(p);
        if p == from {
            break;
        }
        cur = p;
    }
    path.reverse();
    path
}
