use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, RESERVED};
use crate::document::{
    AbsenceDecl, Document, Domain, EquationDecl, EventDecl, Scenario, SimDirectives, Span, SpanTable, VariableDecl,
};
use crate::dynamics::Injection;
use crate::expr::{BinOp, Expr, Func};
use crate::model::{
    action_id, extract_region, split_action_id, validate_static, ActionKind, Delay, DelayUnit, Mode, RegionError,
    Severity, StaticModel,
};

/// Parses a `.tm` document and checks it: paths resolve, ids are unique,
/// regions are connected, names in guards and equations are declared, and
/// the static model is well formed.
pub fn parse(src: &str) -> Result<Document, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let raw = p.document()?;
    Builder::default().build(raw)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type Named = (String, Span);

struct RawFlow {
    source: Named,
    target: Named,
    thing: Option<String>,
}

struct RawTrigger {
    source: Named,
    target: Named,
    delay: Option<Delay>,
    guard: Option<(Expr, Span)>,
    terminates: bool,
}

struct RawEvent {
    id: Named,
    description: String,
    region: Vec<Named>,
    is_state: bool,
    repeat: Option<u32>,
    absence: Option<(Named, String, Option<u32>)>,
}

struct RawVariable {
    name: Named,
    domain: Domain,
    values: Vec<(i64, Span, Named)>,
}

#[derive(Default)]
struct RawDirectives {
    span: Option<Span>,
    max_ticks: Option<(u64, Span)>,
    ticks_per_minute: Option<u64>,
    initial: Vec<Named>,
    deadlines: Vec<(Named, u64)>,
    sets: Vec<(Named, i64, Span)>,
    injections: Vec<(Named, u64, Option<u64>)>,
}

struct RawThimac {
    path: Named,
    label: Option<String>,
    actions: Vec<(ActionKind, Span)>,
    children: Vec<RawThimac>,
}

struct RawDoc {
    name: Named,
    mode: Mode,
    thimacs: Vec<RawThimac>,
    flows: Vec<RawFlow>,
    triggers: Vec<RawTrigger>,
    events: Vec<RawEvent>,
    variables: Vec<RawVariable>,
    equations: Vec<(Named, Expr, Span)>,
    simulate: Option<RawDirectives>,
    scenarios: Vec<(Named, RawDirectives)>,
}

fn join(a: Span, b: Span) -> Span {
    Span { offset: a.offset, len: (b.offset + b.len).saturating_sub(a.offset), line: a.line, column: a.column }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { span: self.span(), expected: expected.into(), found: self.peek().describe() })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.is_kw(kw);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_kw(&mut self, kw: &str) -> Result<Span, ParseError> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        let hit = self.peek() == t;
        if hit {
            self.bump();
        }
        hit
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.error(what)
        }
    }

    /// A dotted path or plain name.
    fn path(&mut self, what: &str) -> Result<Named, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => self.error(what),
        }
    }

    /// A single name that is not a reserved word.
    fn name(&mut self, what: &str) -> Result<Named, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !s.contains('.') && !RESERVED.contains(&s.as_str()) => Ok((s, self.bump().span)),
            _ => self.error(what),
        }
    }

    fn string(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(what),
        }
    }

    fn uint(&mut self, what: &str) -> Result<(u64, Span), ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => Ok((v as u64, self.bump().span)),
            _ => self.error(what),
        }
    }

    fn int(&mut self, what: &str) -> Result<(i64, Span), ParseError> {
        let start = self.span();
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(v) => {
                let end = self.bump().span;
                Ok((if neg { -v } else { v }, join(start, end)))
            }
            _ => self.error(what),
        }
    }

    fn repeat_count(&mut self) -> Result<Option<u32>, ParseError> {
        if !self.eat_kw("repeat") {
            return Ok(None);
        }
        let (v, span) = self.uint("a repeat count")?;
        match u32::try_from(v) {
            Ok(v) if v > 0 => Ok(Some(v)),
            _ => Err(ParseError::Semantic { span, message: "repeat count must be between 1 and 2^32-1".into() }),
        }
    }

    fn document(&mut self) -> Result<RawDoc, ParseError> {
        self.expect_kw("model")?;
        let name = self.name("a model name")?;
        let mode = if self.eat_kw("full") {
            Mode::Full
        } else {
            self.eat_kw("simplified");
            Mode::Simplified
        };
        let mut doc = RawDoc {
            name,
            mode,
            thimacs: Vec::new(),
            flows: Vec::new(),
            triggers: Vec::new(),
            events: Vec::new(),
            variables: Vec::new(),
            equations: Vec::new(),
            simulate: None,
            scenarios: Vec::new(),
        };
        loop {
            let kw = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                _ => return self.error("a declaration"),
            };
            match kw.as_str() {
                "thimac" => {
                    let t = self.thimac(None)?;
                    doc.thimacs.push(t);
                }
                "flow" => doc.flows.push(self.flow()?),
                "trigger" => doc.triggers.push(self.trigger()?),
                "event" => doc.events.push(self.event()?),
                "variable" => doc.variables.push(self.variable()?),
                "equation" => {
                    self.bump();
                    let target = self.name("a variable name")?;
                    self.expect(Tok::Assign, "`=`")?;
                    let start = self.span();
                    let body = self.expr(0)?;
                    doc.equations.push((target, body, join(start, self.prev_span())));
                }
                "simulate" => {
                    let span = self.bump().span;
                    if doc.simulate.is_some() {
                        return Err(ParseError::DuplicateId { span, id: "simulate".into() });
                    }
                    let mut d = self.directives()?;
                    d.span = Some(span);
                    doc.simulate = Some(d);
                }
                "scenario" => {
                    self.bump();
                    let name = self.name("a scenario name")?;
                    let d = self.directives()?;
                    doc.scenarios.push((name, d));
                }
                _ => return self.error("a declaration"),
            }
        }
        Ok(doc)
    }

    fn thimac(&mut self, parent: Option<&str>) -> Result<RawThimac, ParseError> {
        self.expect_kw("thimac")?;
        let (name, span) = self.name("a thimac name")?;
        if name.parse::<ActionKind>().is_ok() {
            return Err(ParseError::Semantic {
                span,
                message: format!("`{name}` is an action kind, not a thimac name"),
            });
        }
        let path = match parent {
            Some(p) => format!("{p}.{name}"),
            None => name,
        };
        let label = match self.peek() {
            Tok::Str(_) => Some(self.string("a label")?),
            _ => None,
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut actions = Vec::new();
        if self.eat_kw("actions") {
            self.expect(Tok::Colon, "`:`")?;
            loop {
                let (k, kspan) = self.path("an action kind")?;
                let kind = k.parse::<ActionKind>().map_err(|_| ParseError::Syntax {
                    span: kspan,
                    expected: "one of Create, Process, Release, Transfer, Receive".into(),
                    found: format!("`{k}`"),
                })?;
                actions.push((kind, kspan));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let mut children = Vec::new();
        while self.is_kw("thimac") {
            children.push(self.thimac(Some(&path))?);
        }
        self.expect(Tok::RBrace, "`}` or a nested `thimac`")?;
        Ok(RawThimac { path: (path, span), label, actions, children })
    }

    fn flow(&mut self) -> Result<RawFlow, ParseError> {
        self.expect_kw("flow")?;
        let source = self.path("a source action path")?;
        self.expect(Tok::Arrow, "`->`")?;
        let target = self.path("a target action path")?;
        let thing = if self.eat_kw("carrying") {
            match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    Some(s)
                }
                _ => Some(self.name("the name of what flows")?.0),
            }
        } else {
            None
        };
        Ok(RawFlow { source, target, thing })
    }

    fn trigger(&mut self) -> Result<RawTrigger, ParseError> {
        self.expect_kw("trigger")?;
        let source = self.path("a source action path")?;
        self.expect(Tok::Squiggle, "`~>`")?;
        let target = self.path("a target action path")?;
        let delay = if self.eat_kw("after") {
            let (amount, _) = self.uint("a delay")?;
            let unit = if self.eat_kw("minutes") {
                DelayUnit::Minutes
            } else {
                self.eat_kw("ticks");
                DelayUnit::Ticks
            };
            Some(Delay { amount, unit })
        } else {
            None
        };
        let guard = if self.eat_kw("when") {
            let start = self.span();
            let e = self.expr(0)?;
            Some((e, join(start, self.prev_span())))
        } else {
            None
        };
        let terminates = self.eat_kw("terminates");
        Ok(RawTrigger { source, target, delay, guard, terminates })
    }

    fn event(&mut self) -> Result<RawEvent, ParseError> {
        self.expect_kw("event")?;
        let id = self.name("an event id")?;
        let description = self.string("an event description")?;
        self.expect_kw("region")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut region = Vec::new();
        while *self.peek() != Tok::RBrace {
            region.push(self.path("an element path")?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let is_state = self.eat_kw("state");
        let repeat = self.repeat_count()?;
        let absence = if self.eat_kw("absence") {
            let aid = self.name("an absence event id")?;
            let desc = self.string("an absence description")?;
            let rep = self.repeat_count()?;
            Some((aid, desc, rep))
        } else {
            None
        };
        Ok(RawEvent { id, description, region, is_state, repeat, absence })
    }

    fn variable(&mut self) -> Result<RawVariable, ParseError> {
        self.expect_kw("variable")?;
        let name = self.name("a variable name")?;
        let domain = if self.eat_kw("bool") {
            Domain::Bool
        } else if self.eat_kw("int") {
            let (lo, lspan) = self.int("a lower bound")?;
            self.expect(Tok::DotDot, "`..`")?;
            let (hi, hspan) = self.int("an upper bound")?;
            if lo > hi {
                return Err(ParseError::Semantic { span: join(lspan, hspan), message: "empty integer range".into() });
            }
            Domain::Int { lo, hi }
        } else {
            return self.error("`bool` or `int`");
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut values = Vec::new();
        while *self.peek() != Tok::RBrace {
            let (v, vspan) = match self.peek() {
                Tok::Ident(s) if s == "true" => (1, self.bump().span),
                Tok::Ident(s) if s == "false" => (0, self.bump().span),
                _ => self.int("a domain value")?,
            };
            self.expect(Tok::Colon, "`:`")?;
            let ev = self.name("an event id")?;
            values.push((v, vspan, ev));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(RawVariable { name, domain, values })
    }

    fn directives(&mut self) -> Result<RawDirectives, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut d = RawDirectives::default();
        loop {
            let kw = match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(s) => s.clone(),
                _ => return self.error("a simulation setting"),
            };
            match kw.as_str() {
                "max_ticks" => {
                    self.bump();
                    self.expect(Tok::Colon, "`:`")?;
                    d.max_ticks = Some(self.uint("a tick count")?);
                }
                "ticks_per_minute" => {
                    self.bump();
                    self.expect(Tok::Colon, "`:`")?;
                    d.ticks_per_minute = Some(self.uint("a tick count")?.0);
                }
                "initial" => {
                    self.bump();
                    self.expect(Tok::Colon, "`:`")?;
                    self.expect(Tok::LBrace, "`{`")?;
                    while *self.peek() != Tok::RBrace {
                        d.initial.push(self.name("an event id")?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RBrace, "`}`")?;
                }
                "deadline" => {
                    self.bump();
                    let ev = self.name("an event id")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let (t, _) = self.uint("a tick")?;
                    d.deadlines.push((ev, t));
                }
                "set" => {
                    self.bump();
                    let var = self.name("a variable name")?;
                    self.expect(Tok::Assign, "`=`")?;
                    let (v, span) = match self.peek() {
                        Tok::Ident(s) if s == "true" => (1, self.bump().span),
                        Tok::Ident(s) if s == "false" => (0, self.bump().span),
                        _ => self.int("a value")?,
                    };
                    d.sets.push((var, v, span));
                }
                "inject" => {
                    self.bump();
                    let ev = self.name("an event id")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let (at, _) = self.uint("a tick")?;
                    let every = if self.eat_kw("every") {
                        let (p, span) = self.uint("a period")?;
                        if p == 0 {
                            return Err(ParseError::Semantic { span, message: "period must be positive".into() });
                        }
                        Some(p)
                    } else {
                        None
                    };
                    d.injections.push((ev, at, every));
                }
                _ => return self.error("a simulation setting"),
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(d)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Ident(s) if s == "or" => BinOp::Or,
            Tok::Ident(s) if s == "and" => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            _ => return None,
        })
    }

    /// Precedence climbing; binary operators are left-associative.
    fn expr(&mut self, min: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min {
                break;
            }
            self.bump();
            let rhs = self.expr(op.precedence() + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(Expr::Not(Box::new(self.expr(3)?)))
            }
            Tok::Minus => {
                self.bump();
                if let Tok::Int(v) = *self.peek() {
                    self.bump();
                    return Ok(Expr::Int(-v));
                }
                Ok(Expr::Neg(Box::new(self.expr(7)?)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Bool(s == "true"))
            }
            Tok::Ident(s) if s == "min" || s == "max" => {
                self.bump();
                let f = if s == "min" { Func::Min } else { Func::Max };
                self.expect(Tok::LParen, "`(`")?;
                let mut args = vec![self.expr(0)?];
                while self.eat(&Tok::Comma) {
                    args.push(self.expr(0)?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(f, args))
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) && !s.contains('.') => {
                self.bump();
                Ok(Expr::Name(s))
            }
            _ => self.error("an expression"),
        }
    }
}

/// Resolves names and checks the parsed declarations.
#[derive(Default)]
struct Builder {
    spans: BTreeMap<String, Span>,
    ids: BTreeSet<String>,
}

impl Builder {
    fn claim(&mut self, key: String, id: &str, span: Span) -> Result<(), ParseError> {
        if !self.ids.insert(id.to_string()) {
            return Err(ParseError::DuplicateId { span, id: id.into() });
        }
        self.spans.insert(key, span);
        Ok(())
    }

    fn build(mut self, raw: RawDoc) -> Result<Document, ParseError> {
        let mut model = StaticModel::new(raw.mode);
        for t in &raw.thimacs {
            self.add_thimac(&mut model, t)?;
        }
        let resolve = |model: &StaticModel, (p, span): &Named| -> Result<String, ParseError> {
            if model.has_action(p) {
                Ok(p.clone())
            } else {
                Err(ParseError::UnresolvedPath { span: *span, path: p.clone() })
            }
        };
        for f in &raw.flows {
            let s = resolve(&model, &f.source)?;
            let t = resolve(&model, &f.target)?;
            let id = model.add_flow(&s, &t, f.thing.as_deref()).id.clone();
            self.spans.insert(format!("flow:{id}"), join(f.source.1, f.target.1));
        }
        for tr in &raw.triggers {
            let s = resolve(&model, &tr.source)?;
            let t = resolve(&model, &tr.target)?;
            let arc = model.add_trigger(&s, &t);
            arc.delay = tr.delay;
            arc.guard = tr.guard.as_ref().map(|g| g.0.clone());
            arc.terminates = tr.terminates;
            let id = arc.id.clone();
            self.spans.insert(format!("trigger:{id}"), join(tr.source.1, tr.target.1));
        }
        let errors: Vec<_> = validate_static(&model).into_iter().filter(|d| d.severity == Severity::Error).collect();
        if let Some(first) = errors.first() {
            let span = self.element_span(&first.element).unwrap_or(raw.name.1);
            return Err(ParseError::Invalid { span, diagnostics: errors });
        }

        let mut doc = Document::new(raw.name.0.clone(), model);
        for e in &raw.events {
            self.claim(format!("event:{}", e.id.0), &e.id.0, e.id.1)?;
            let mut elements = Vec::new();
            for (p, span) in &e.region {
                if !doc.model.is_element(p) {
                    return Err(ParseError::UnresolvedPath { span: *span, path: p.clone() });
                }
                elements.push(p.clone());
            }
            let region = extract_region(&doc.model, &elements).map_err(|err| {
                let message = match err {
                    RegionError::Empty => format!("event `{}` has an empty region", e.id.0),
                    other => format!("region of `{}`: {other}", e.id.0),
                };
                ParseError::Semantic { span: e.id.1, message }
            })?;
            let absence = match &e.absence {
                Some(((aid, aspan), desc, rep)) => {
                    self.claim(format!("event:{aid}"), aid, *aspan)?;
                    Some(AbsenceDecl { id: aid.clone(), description: desc.clone(), repeat: *rep })
                }
                None => None,
            };
            doc.events.push(EventDecl {
                id: e.id.0.clone(),
                description: e.description.clone(),
                region,
                is_state: e.is_state,
                repeat: e.repeat,
                absence,
            });
        }

        for v in &raw.variables {
            self.claim(format!("variable:{}", v.name.0), &v.name.0, v.name.1)?;
            let mut values: Vec<(i64, String)> = Vec::new();
            for (value, vspan, (ev, espan)) in &v.values {
                if !v.domain.contains(*value) {
                    return Err(ParseError::Semantic {
                        span: *vspan,
                        message: format!("{value} is outside the domain of `{}`", v.name.0),
                    });
                }
                if values.iter().any(|(x, _)| x == value) {
                    return Err(ParseError::DuplicateId { span: *vspan, id: format!("{}={value}", v.name.0) });
                }
                if !doc.has_event(ev) {
                    return Err(ParseError::UnresolvedPath { span: *espan, path: ev.clone() });
                }
                values.push((*value, ev.clone()));
            }
            doc.variables.push(VariableDecl { name: v.name.0.clone(), domain: v.domain, values });
        }

        let mut targets = BTreeSet::new();
        for ((target, tspan), body, bspan) in &raw.equations {
            if doc.variable(target).is_none() {
                return Err(ParseError::Semantic { span: *tspan, message: format!("unknown variable `{target}`") });
            }
            if !targets.insert(target.clone()) {
                return Err(ParseError::DuplicateId { span: *tspan, id: format!("equation {target}") });
            }
            if let Some(n) = body.names().into_iter().find(|n| doc.variable(n).is_none()) {
                return Err(ParseError::Semantic { span: *bspan, message: format!("unknown variable `{n}`") });
            }
            self.spans.insert(format!("equation:{target}"), *tspan);
            doc.equations.push(EquationDecl { target: target.clone(), body: body.clone() });
        }

        for (tr, arc) in raw.triggers.iter().zip(&doc.model.triggers) {
            if let Some((g, gspan)) = &tr.guard {
                if let Some(n) = g.names().into_iter().find(|n| doc.variable(n).is_none() && !doc.has_event(n)) {
                    return Err(ParseError::Semantic {
                        span: *gspan,
                        message: format!("guard name `{n}` is neither a variable nor an event"),
                    });
                }
            }
            if arc.terminates && !doc.events.iter().any(|e| e.is_state && e.region.contains(&arc.target)) {
                return Err(ParseError::Semantic {
                    span: tr.target.1,
                    message: format!("terminating trigger target `{}` lies in no state event", arc.target),
                });
            }
        }

        if let Some(d) = &raw.simulate {
            doc.directives = self.directives(&doc, d)?;
        }
        for ((name, span), d) in &raw.scenarios {
            if doc.scenario(name).is_some() {
                return Err(ParseError::DuplicateId { span: *span, id: name.clone() });
            }
            self.spans.insert(format!("scenario:{name}"), *span);
            let directives = self.directives(&doc, d)?;
            doc.scenarios.push(Scenario { name: name.clone(), directives });
        }
        doc.spans = SpanTable(self.spans);
        Ok(doc)
    }

    fn add_thimac(&mut self, model: &mut StaticModel, t: &RawThimac) -> Result<(), ParseError> {
        let (path, span) = &t.path;
        // thimacs have their own namespace
        if self.spans.contains_key(&format!("thimac:{path}")) {
            return Err(ParseError::DuplicateId { span: *span, id: path.clone() });
        }
        self.spans.insert(format!("thimac:{path}"), *span);
        let mut kinds = Vec::new();
        for (k, kspan) in &t.actions {
            if kinds.contains(k) {
                return Err(ParseError::DuplicateId { span: *kspan, id: action_id(path, *k) });
            }
            self.spans.insert(format!("action:{}", action_id(path, *k)), *kspan);
            kinds.push(*k);
        }
        model.add_thimac(path, &kinds).label = t.label.clone();
        for c in &t.children {
            self.add_thimac(model, c)?;
        }
        Ok(())
    }

    fn element_span(&self, element: &str) -> Option<Span> {
        ["thimac", "action", "flow", "trigger"]
            .iter()
            .find_map(|k| self.spans.get(&format!("{k}:{element}")).copied())
            .or_else(|| {
                split_action_id(element).and_then(|(owner, _)| self.spans.get(&format!("thimac:{owner}")).copied())
            })
    }

    fn directives(&mut self, doc: &Document, d: &RawDirectives) -> Result<SimDirectives, ParseError> {
        let event = |(id, span): &Named| -> Result<String, ParseError> {
            if doc.has_event(id) {
                Ok(id.clone())
            } else {
                Err(ParseError::UnresolvedPath { span: *span, path: id.clone() })
            }
        };
        let mut out = SimDirectives::default();
        if let Some((m, span)) = d.max_ticks {
            if m == 0 {
                return Err(ParseError::Semantic { span, message: "max_ticks must be positive".into() });
            }
            out.max_ticks = Some(m);
        }
        out.ticks_per_minute = d.ticks_per_minute;
        for e in &d.initial {
            out.initial.push(event(e)?);
        }
        for (e, t) in &d.deadlines {
            out.deadlines.push((event(e)?, *t));
        }
        for ((name, nspan), v, vspan) in &d.sets {
            let var = doc
                .variable(name)
                .ok_or_else(|| ParseError::Semantic { span: *nspan, message: format!("unknown variable `{name}`") })?;
            if !var.domain.contains(*v) {
                return Err(ParseError::Semantic {
                    span: *vspan,
                    message: format!("{v} is outside the domain of `{name}`"),
                });
            }
            out.sets.push((name.clone(), *v));
        }
        for (e, at, every) in &d.injections {
            out.injections.push(Injection { event: event(e)?, at: *at, every: *every });
        }
        if let Some(span) = d.span {
            self.spans.insert("simulate".into(), span);
        }
        Ok(out)
    }
}
