//! Deterministic tick simulator.
//!
//! Each tick: initial and injected events realize; then positive events whose
//! links are satisfied realize and terminating links close open states,
//! repeated until nothing changes; then absence monitors run, and if one
//! fires the positive pass repeats. Flow links into distinct arcs of a
//! region must all be satisfied; links that pass a trigger are alternatives.
//! An absence event drives only links that start with a trigger whose guard
//! names it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::chronology::positive_areas;
use super::links::{links, region_reaches, Link};
use super::{Event, Polarity, Realization, SimConfig, SimError, Tick, Trace};
use crate::expr::ExprError;
use crate::model::ArcKind;
use crate::Document;

impl From<ExprError> for SimError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Unresolved(n) => SimError::GuardUnresolvable(n),
            other => SimError::Guard(other.to_string()),
        }
    }
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    events: Vec<Event>,
    index: HashMap<String, usize>,
    sources: Vec<Vec<usize>>,
    incoming: Vec<Vec<Link>>,
    terminations: Vec<Link>,
    /// area index → positive event index
    area_event: Vec<usize>,
    negative_of: Vec<Option<usize>>,
    counterpart: Vec<Option<usize>>,
    reals: Vec<Vec<(Tick, Option<Tick>)>>,
    order: Vec<(usize, usize)>,
    last_start: Vec<Option<Tick>>,
    fired: Vec<bool>,
    misses: Vec<u32>,
}

pub fn simulate(doc: &Document, cfg: &SimConfig) -> Result<Trace, SimError> {
    doc.check_config(cfg)?;
    let mut sim = Sim::new(doc, cfg);
    let mut truncated = false;
    for t in 0..cfg.max_ticks {
        sim.tick(t)?;
        if !sim.pending(t) {
            break;
        }
        if t + 1 == cfg.max_ticks {
            truncated = true;
        }
    }
    Ok(sim.into_trace(doc, truncated))
}

impl<'a> Sim<'a> {
    fn new(doc: &Document, cfg: &'a SimConfig) -> Self {
        let events = doc.event_list();
        let index: HashMap<String, usize> = events.iter().enumerate().map(|(i, e)| (e.id.clone(), i)).collect();
        let (positives, areas) = positive_areas(doc);
        let area_event: Vec<usize> = positives.iter().map(|p| index[&p.id]).collect();
        let area_index: HashMap<&str, usize> = positives.iter().enumerate().map(|(a, p)| (p.id.as_str(), a)).collect();
        let counterpart: Vec<Option<usize>> =
            events.iter().map(|e| e.counterpart_of.as_ref().map(|c| index[c])).collect();
        let mut negative_of = vec![None; events.len()];
        for (i, c) in counterpart.iter().enumerate() {
            if let Some(c) = c {
                negative_of[*c] = Some(i);
            }
        }
        let area_of: Vec<usize> =
            events.iter().map(|e| area_index[e.counterpart_of.as_deref().unwrap_or(&e.id)]).collect();
        let mut sources = vec![Vec::new(); areas.len()];
        for (i, &a) in area_of.iter().enumerate() {
            sources[a].push(i);
        }
        let mut incoming = vec![Vec::new(); events.len()];
        let mut terminations = Vec::new();
        for l in links(&doc.model, &areas) {
            if l.terminates {
                terminations.push(l);
            } else {
                incoming[area_event[l.to]].push(l);
            }
        }
        let n = events.len();
        Sim {
            cfg,
            events,
            index,
            sources,
            incoming,
            terminations,
            area_event,
            negative_of,
            counterpart,
            reals: vec![Vec::new(); n],
            order: Vec::new(),
            last_start: vec![None; n],
            fired: vec![false; n],
            misses: vec![0; n],
        }
    }

    fn active_at(&self, i: usize, t: Tick) -> bool {
        let is_state = self.events[i].is_state;
        self.reals[i]
            .iter()
            .any(|&(start, end)| Realization { event: String::new(), start, end }.active_at(t, is_state))
    }

    fn realize(&mut self, i: usize, t: Tick) {
        let e = &self.events[i];
        // an absence's repeat counts missed cycles, not duration
        let span = if e.polarity == Polarity::Negative { 1 } else { e.repeat.unwrap_or(1).max(1) };
        let end = if e.is_state { None } else { Some(t + u64::from(span) - 1) };
        self.reals[i].push((t, end));
        self.order.push((i, self.reals[i].len() - 1));
        self.last_start[i] = Some(t);
    }

    /// Start of propagation for a source realization: a state's start, an
    /// instant's last tick.
    fn completion(&self, s: usize, (start, end): (Tick, Option<Tick>)) -> Tick {
        if self.events[s].is_state {
            start
        } else {
            end.unwrap_or(start)
        }
    }

    fn guards_hold(&self, link: &Link, at: Tick) -> Result<bool, SimError> {
        let lookup = |name: &str| -> Result<i64, SimError> {
            if let Some(v) = self.cfg.exogenous.get(name) {
                return Ok(*v);
            }
            match self.index.get(name) {
                Some(&j) => Ok(i64::from(self.active_at(j, at))),
                None => Err(SimError::GuardUnresolvable(name.to_string())),
            }
        };
        for g in link.guards() {
            if g.eval(&lookup)? == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Moments `(completion, arrival)` at which `link` delivers a realization
    /// of one of its source events.
    fn deliveries(&self, link: &Link) -> Vec<(usize, Tick, Tick)> {
        let delay = link.delay(self.cfg.ticks_per_minute);
        let mut out = Vec::new();
        for &s in &self.sources[link.from] {
            // nothing flows out of a non-occurrence; an absence drives only
            // a trigger whose guard names it
            if self.counterpart[s].is_some() && !names_absence(link, &self.events[s].id) {
                continue;
            }
            for &r in &self.reals[s] {
                let c = self.completion(s, r);
                let m = c + delay;
                if self.events[s].is_state && !(r.0 <= m && r.1.is_none_or(|e| m < e)) {
                    continue;
                }
                out.push((s, c, m));
            }
        }
        out
    }

    fn satisfied(&self, link: &Link, target: usize, t: Tick) -> Result<bool, SimError> {
        for (_, c, m) in self.deliveries(link) {
            // a source occurrence that completed by the target's last start
            // is already accounted for
            if m > t || self.last_start[target].is_some_and(|l| c <= l) {
                continue;
            }
            if self.guards_hold(link, c)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn enabled(&self, b: usize, t: Tick) -> Result<bool, SimError> {
        if self.last_start[b] == Some(t) || (self.events[b].is_state && self.active_at(b, t)) {
            return Ok(false);
        }
        if self.negative_of[b].is_some_and(|n| self.active_at(n, t)) {
            return Ok(false);
        }
        let inc = &self.incoming[b];
        if inc.is_empty() {
            return Ok(false);
        }
        let mut any = false;
        let mut flow_groups: BTreeMap<&str, bool> = BTreeMap::new();
        for l in inc {
            let s = self.satisfied(l, b, t)?;
            any |= s;
            if !l.via_trigger() {
                *flow_groups.entry(l.final_arc()).or_default() |= s;
            }
        }
        Ok(any && flow_groups.values().all(|&s| s))
    }

    fn positive_pass(&mut self, t: Tick) -> Result<bool, SimError> {
        let mut changed = false;
        for b in 0..self.events.len() {
            if self.events[b].polarity == Polarity::Positive && self.enabled(b, t)? {
                self.realize(b, t);
                changed = true;
            }
        }
        Ok(changed)
    }

    fn termination_pass(&mut self, t: Tick) -> Result<bool, SimError> {
        let mut closes = Vec::new();
        for l in &self.terminations {
            let b = self.area_event[l.to];
            let Some(open) = self.reals[b].iter().position(|&(s, e)| e.is_none() && s <= t) else {
                continue;
            };
            for (_, c, m) in self.deliveries(l) {
                if m == t && self.guards_hold(l, c)? {
                    closes.push((b, open));
                    break;
                }
            }
        }
        let changed = !closes.is_empty();
        for (b, r) in closes {
            self.reals[b][r].1 = Some(t);
        }
        Ok(changed)
    }

    fn settle(&mut self, t: Tick) -> Result<(), SimError> {
        loop {
            let a = self.positive_pass(t)?;
            let b = self.termination_pass(t)?;
            if !a && !b {
                return Ok(());
            }
        }
    }

    fn counterpart_covers(&self, p: usize, lo: Tick, hi: Tick) -> bool {
        let is_state = self.events[p].is_state;
        self.reals[p].iter().any(|&(start, end)| {
            Realization { event: String::new(), start, end }.covered(is_state).is_some_and(|(a, b)| a <= hi && lo <= b)
        })
    }

    fn absence_pass(&mut self, t: Tick) -> bool {
        let mut fired_any = false;
        for n in 0..self.events.len() {
            let Some(p) = self.counterpart[n] else { continue };
            if self.fired[n] {
                continue;
            }
            let Some(&d) = self.cfg.deadlines.get(&self.events[n].id) else { continue };
            let fire = match self.events[n].repeat {
                None => t == d && !self.reals[p].iter().any(|&(s, _)| s <= d),
                Some(k) => {
                    if d == 0 || t == 0 || !t.is_multiple_of(d) {
                        continue;
                    }
                    let lo = if t == d { 0 } else { t - d + 1 };
                    if self.counterpart_covers(p, lo, t) {
                        self.misses[n] = 0;
                    } else {
                        self.misses[n] += 1;
                    }
                    self.misses[n] >= k.max(1)
                }
            };
            if fire && !self.active_at(p, t) {
                self.realize(n, t);
                self.fired[n] = true;
                fired_any = true;
            }
        }
        fired_any
    }

    fn tick(&mut self, t: Tick) -> Result<(), SimError> {
        let mut forced: Vec<usize> = Vec::new();
        if t == 0 {
            forced.extend(self.cfg.initial.iter().map(|e| self.index[e]));
        }
        forced.extend(self.cfg.injections.iter().filter(|i| i.fires_at(t)).map(|i| self.index[&i.event]));
        forced.sort_unstable();
        forced.dedup();
        for i in forced {
            let busy = self.last_start[i] == Some(t) || (self.events[i].is_state && self.active_at(i, t));
            if !busy {
                self.realize(i, t);
            }
        }
        self.settle(t)?;
        if self.absence_pass(t) {
            self.settle(t)?;
        }
        Ok(())
    }

    /// Whether anything can still happen after tick `t`.
    fn pending(&self, t: Tick) -> bool {
        if self.cfg.injections.iter().any(|i| i.fires_after(t)) {
            return true;
        }
        for n in 0..self.events.len() {
            let (Some(p), false) = (self.counterpart[n], self.fired[n]) else { continue };
            let Some(&d) = self.cfg.deadlines.get(&self.events[n].id) else { continue };
            let live = match self.events[n].repeat {
                None => d > t && self.reals[p].is_empty(),
                Some(_) => d > 0,
            };
            if live {
                return true;
            }
        }
        let all_links = self.incoming.iter().flatten().chain(&self.terminations);
        for l in all_links {
            if self.deliveries(l).iter().any(|&(_, _, m)| m > t) {
                return true;
            }
        }
        false
    }

    fn into_trace(self, doc: &Document, truncated: bool) -> Trace {
        let mut order = self.order;
        order.sort_by_key(|&(i, r)| (self.reals[i][r].0, i, r));
        let realizations = order
            .into_iter()
            .map(|(i, r)| {
                let (start, end) = self.reals[i][r];
                Realization { event: self.events[i].id.clone(), start, end }
            })
            .collect();
        Trace { model: doc.name.clone(), config: self.cfg.clone(), realizations, truncated, analysis: None }
    }
}

fn names_absence(link: &Link, id: &str) -> bool {
    let first = &link.hops[0];
    first.kind == ArcKind::Trigger && first.guard.as_ref().is_some_and(|g| g.names().contains(id))
}

/// True when both events start on the same tick and neither region reaches
/// the other through flows or triggers.
pub fn check_simultaneous(doc: &Document, trace: &Trace, a: &str, b: &str) -> Result<bool, SimError> {
    let ea = doc.event(a).ok_or_else(|| SimError::UnknownEvent(a.into()))?;
    let eb = doc.event(b).ok_or_else(|| SimError::UnknownEvent(b.into()))?;
    let sa = trace.first_start(a).ok_or_else(|| SimError::NotRealized(a.into()))?;
    let sb = trace.first_start(b).ok_or_else(|| SimError::NotRealized(b.into()))?;
    if a == b {
        return Ok(true);
    }
    if sa != sb {
        return Ok(false);
    }
    let ra: BTreeSet<&str> = ea.region.actions().collect();
    let rb: BTreeSet<&str> = eb.region.actions().collect();
    Ok(!region_reaches(&doc.model, &ra, &rb) && !region_reaches(&doc.model, &rb, &ra))
}
