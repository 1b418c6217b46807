//! Lifted PDDL syntax trees for the supported numeric fragment.

use std::collections::{HashMap, HashSet};

use super::error::PddlError;
use super::sexpr::{self, syntax, Sexpr};
use super::task::{CmpOp, EffectOp};
use crate::num::{parse_decimal, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomAst {
    pub pred: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Num(Q),
    Fluent(String, Vec<Term>),
    Add(Vec<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Neg(Box<ExprAst>),
    Mul(Vec<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConditionAst {
    Atom(AtomAst),
    Compare(CmpOp, ExprAst, ExprAst),
}

#[derive(Clone, Debug, PartialEq)]
pub enum EffectAst {
    Add(AtomAst),
    Del(AtomAst),
    Numeric(EffectOp, String, Vec<Term>, ExprAst),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    pub name: String,
    /// (variable, type) pairs
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionAst {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub precondition: Vec<ConditionAst>,
    pub effects: Vec<EffectAst>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// (type, parent type)
    pub types: Vec<(String, String)>,
    pub constants: Vec<(String, String)>,
    pub predicates: Vec<Signature>,
    pub functions: Vec<Signature>,
    pub actions: Vec<ActionAst>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&Signature> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Signature> {
        self.functions.iter().find(|p| p.name == name)
    }

    pub fn has_type(&self, t: &str) -> bool {
        t == "object" || self.types.iter().any(|(n, _)| n == t)
    }

    /// `sub` equals `sup` or inherits from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub.to_string();
        let mut seen = HashSet::new();
        loop {
            if cur == sup || sup == "object" {
                return true;
            }
            if !seen.insert(cur.clone()) {
                return false;
            }
            match self.types.iter().find(|(n, _)| *n == cur) {
                Some((_, parent)) => cur = parent.clone(),
                None => return false,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<(String, String)>,
    pub init_facts: Vec<(String, Vec<String>)>,
    pub init_values: Vec<(String, Vec<String>, Q)>,
    pub goal: Vec<ConditionAst>,
}

const REJECTED_CONDITIONS: &[&str] = &["not", "or", "imply", "forall", "exists", "when"];
const REJECTED_EFFECTS: &[&str] = &["scale-up", "scale-down", "when", "forall"];
const ACCEPTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":numeric-fluents",
    ":fluents",
    ":equality",
    ":action-costs",
];

fn unsupported(construct: impl Into<String>, s: &Sexpr) -> PddlError {
    PddlError::Unsupported {
        construct: construct.into(),
        line: s.pos().line,
    }
}

fn expect_list<'a>(s: &'a Sexpr, what: &str) -> Result<&'a [Sexpr], PddlError> {
    s.list().ok_or_else(|| syntax(s.pos(), what, s.describe()))
}

fn expect_atom<'a>(s: &'a Sexpr, what: &str) -> Result<&'a str, PddlError> {
    s.atom().ok_or_else(|| syntax(s.pos(), what, s.describe()))
}

/// Parses `a b - t c - u d` into (name, type) pairs.
fn typed_list(items: &[Sexpr], require_vars: bool) -> Result<Vec<(String, String)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = &items[i];
        if let Some(l) = s.list() {
            if l.first().and_then(|h| h.atom()) == Some("either") {
                return Err(unsupported("either", s));
            }
            return Err(syntax(s.pos(), "a name or `-`", s.describe()));
        }
        let tok = s.atom().unwrap_or_default();
        if tok == "-" {
            let t = items
                .get(i + 1)
                .ok_or_else(|| syntax(s.pos(), "a type after `-`", "end of list"))?;
            if t.head() == Some("either") {
                return Err(unsupported("either", t));
            }
            let t = expect_atom(t, "a type name")?;
            for name in pending.drain(..) {
                out.push((name, t.to_string()));
            }
            i += 2;
            continue;
        }
        if require_vars && !tok.starts_with('?') {
            return Err(syntax(s.pos(), "a variable `?x`", format!("`{tok}`")));
        }
        pending.push(tok.to_string());
        i += 1;
    }
    for name in pending {
        out.push((name, "object".to_string()));
    }
    Ok(out)
}

fn term(s: &Sexpr) -> Result<Term, PddlError> {
    let a = expect_atom(s, "a variable or object name")?;
    Ok(if a.starts_with('?') {
        Term::Var(a.to_string())
    } else {
        Term::Const(a.to_string())
    })
}

fn atom_ast(items: &[Sexpr], s: &Sexpr) -> Result<AtomAst, PddlError> {
    let pred = expect_atom(&items[0], "a predicate name")?;
    if items.is_empty() {
        return Err(syntax(s.pos(), "a predicate", "`()`"));
    }
    Ok(AtomAst {
        pred: pred.to_string(),
        args: items[1..].iter().map(term).collect::<Result<_, _>>()?,
    })
}

fn cmp_op(tok: &str) -> Option<CmpOp> {
    Some(match tok {
        "<=" => CmpOp::Le,
        "<" => CmpOp::Lt,
        "=" => CmpOp::Eq,
        ">" => CmpOp::Gt,
        ">=" => CmpOp::Ge,
        _ => return None,
    })
}

fn expr(s: &Sexpr) -> Result<ExprAst, PddlError> {
    match s {
        Sexpr::Atom(a, _) => {
            if let Some(v) = parse_decimal(a) {
                Ok(ExprAst::Num(v))
            } else if a.starts_with('?') {
                Err(unsupported(format!("numeric parameter {a}"), s))
            } else {
                Ok(ExprAst::Fluent(a.clone(), Vec::new()))
            }
        }
        Sexpr::List(items, _) => {
            let head = items
                .first()
                .ok_or_else(|| syntax(s.pos(), "an expression", "`()`"))?;
            let head = expect_atom(head, "an operator or function name")?;
            let args = &items[1..];
            match head {
                "+" | "*" => {
                    if args.is_empty() {
                        return Err(syntax(s.pos(), "operands", "none"));
                    }
                    let parts = args.iter().map(expr).collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "+" {
                        ExprAst::Add(parts)
                    } else {
                        ExprAst::Mul(parts)
                    })
                }
                "-" => match args {
                    [a] => Ok(ExprAst::Neg(Box::new(expr(a)?))),
                    [a, b] => Ok(ExprAst::Sub(Box::new(expr(a)?), Box::new(expr(b)?))),
                    _ => Err(syntax(s.pos(), "one or two operands for `-`", format!("{}", args.len()))),
                },
                "/" => match args {
                    [a, b] => Ok(ExprAst::Div(Box::new(expr(a)?), Box::new(expr(b)?))),
                    _ => Err(syntax(s.pos(), "two operands for `/`", format!("{}", args.len()))),
                },
                name => Ok(ExprAst::Fluent(
                    name.to_string(),
                    args.iter().map(term).collect::<Result<_, _>>()?,
                )),
            }
        }
    }
}

fn condition(s: &Sexpr, out: &mut Vec<ConditionAst>) -> Result<(), PddlError> {
    let items = expect_list(s, "a condition")?;
    let Some(head) = items.first() else {
        // `()` is the empty conjunction
        return Ok(());
    };
    let head = expect_atom(head, "a condition keyword or predicate")?;
    if head == "and" {
        for c in &items[1..] {
            condition(c, out)?;
        }
        return Ok(());
    }
    if REJECTED_CONDITIONS.contains(&head) {
        return Err(unsupported(head, s));
    }
    if let Some(op) = cmp_op(head) {
        if items.len() != 3 {
            return Err(syntax(s.pos(), "two operands", format!("{}", items.len() - 1)));
        }
        out.push(ConditionAst::Compare(op, expr(&items[1])?, expr(&items[2])?));
        return Ok(());
    }
    out.push(ConditionAst::Atom(atom_ast(items, s)?));
    Ok(())
}

fn effect(s: &Sexpr, out: &mut Vec<EffectAst>) -> Result<(), PddlError> {
    let items = expect_list(s, "an effect")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head = expect_atom(head, "an effect keyword or predicate")?;
    match head {
        "and" => {
            for e in &items[1..] {
                effect(e, out)?;
            }
            Ok(())
        }
        "not" => {
            let inner = items
                .get(1)
                .ok_or_else(|| syntax(s.pos(), "an atom after `not`", "end of list"))?;
            let l = expect_list(inner, "an atom")?;
            if l.is_empty() {
                return Err(syntax(inner.pos(), "an atom", "`()`"));
            }
            out.push(EffectAst::Del(atom_ast(l, inner)?));
            Ok(())
        }
        "increase" | "decrease" | "assign" => {
            let op = match head {
                "increase" => EffectOp::Increase,
                "decrease" => EffectOp::Decrease,
                _ => EffectOp::Assign,
            };
            if items.len() != 3 {
                return Err(syntax(s.pos(), "a fluent and an expression", format!("{} operands", items.len() - 1)));
            }
            let (name, args) = match expr(&items[1])? {
                ExprAst::Fluent(n, a) => (n, a),
                _ => return Err(syntax(items[1].pos(), "a fluent", items[1].describe())),
            };
            out.push(EffectAst::Numeric(op, name, args, expr(&items[2])?));
            Ok(())
        }
        h if REJECTED_EFFECTS.contains(&h) => Err(unsupported(h, s)),
        _ => {
            out.push(EffectAst::Add(atom_ast(items, s)?));
            Ok(())
        }
    }
}

fn action(items: &[Sexpr], s: &Sexpr) -> Result<ActionAst, PddlError> {
    let name = expect_atom(
        items.get(1).ok_or_else(|| syntax(s.pos(), "an action name", "end of list"))?,
        "an action name",
    )?;
    let mut act = ActionAst {
        name: name.to_string(),
        params: Vec::new(),
        precondition: Vec::new(),
        effects: Vec::new(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = expect_atom(&items[i], "`:parameters`, `:precondition` or `:effect`")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| syntax(items[i].pos(), format!("a value for {key}"), "end of list"))?;
        match key {
            ":parameters" => act.params = typed_list(expect_list(val, "a parameter list")?, true)?,
            ":precondition" => condition(val, &mut act.precondition)?,
            ":effect" => effect(val, &mut act.effects)?,
            other => return Err(syntax(items[i].pos(), "`:parameters`, `:precondition` or `:effect`", format!("`{other}`"))),
        }
        i += 2;
    }
    Ok(act)
}

fn signatures(items: &[Sexpr]) -> Result<Vec<Signature>, PddlError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let s = &items[i];
        match s {
            Sexpr::List(l, _) => {
                if l.is_empty() {
                    return Err(syntax(s.pos(), "a signature", "`()`"));
                }
                let name = expect_atom(&l[0], "a name")?;
                out.push(Signature {
                    name: name.to_string(),
                    params: typed_list(&l[1..], true)?,
                });
                i += 1;
            }
            // function return types such as `- number`
            Sexpr::Atom(a, _) if a == "-" => {
                let t = items.get(i + 1).and_then(|t| t.atom()).unwrap_or("");
                if t != "number" {
                    return Err(unsupported(format!("function type `{t}`"), s));
                }
                i += 2;
            }
            _ => return Err(syntax(s.pos(), "a signature", s.describe())),
        }
    }
    Ok(out)
}

fn check_params(dom: &DomainAst, params: &[(String, String)], ctx: &str) -> Result<(), PddlError> {
    let mut seen = HashSet::new();
    for (v, t) in params {
        if !dom.has_type(t) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: t.clone(),
            });
        }
        if !seen.insert(v) {
            return Err(PddlError::Invalid(format!("duplicate parameter {v} in {ctx}")));
        }
    }
    Ok(())
}

fn check_term(
    dom: &DomainAst,
    scope: &HashMap<String, String>,
    objects: &HashMap<String, String>,
    t: &Term,
    want: &str,
    ctx: &str,
) -> Result<(), PddlError> {
    let ty = match t {
        Term::Var(v) => scope.get(v).ok_or_else(|| PddlError::Undeclared {
            kind: "variable",
            name: format!("{v} in {ctx}"),
        })?,
        Term::Const(c) => objects.get(c).ok_or_else(|| PddlError::Undeclared {
            kind: "object",
            name: c.clone(),
        })?,
    };
    // a parameter of a supertype may still be bound to a suitable object
    if dom.is_subtype(ty, want) || dom.is_subtype(want, ty) {
        Ok(())
    } else {
        Err(PddlError::Invalid(format!(
            "{} of type {ty} used where {want} is expected in {ctx}",
            t.name()
        )))
    }
}

fn check_args(
    dom: &DomainAst,
    scope: &HashMap<String, String>,
    objects: &HashMap<String, String>,
    sig: &Signature,
    args: &[Term],
    ctx: &str,
) -> Result<(), PddlError> {
    if sig.params.len() != args.len() {
        return Err(PddlError::Invalid(format!(
            "{} expects {} arguments, got {} in {ctx}",
            sig.name,
            sig.params.len(),
            args.len()
        )));
    }
    for (t, (_, want)) in args.iter().zip(&sig.params) {
        check_term(dom, scope, objects, t, want, ctx)?;
    }
    Ok(())
}

pub(crate) fn check_expr(
    dom: &DomainAst,
    scope: &HashMap<String, String>,
    objects: &HashMap<String, String>,
    e: &ExprAst,
    ctx: &str,
) -> Result<(), PddlError> {
    match e {
        ExprAst::Num(_) => Ok(()),
        ExprAst::Fluent(f, args) => {
            let sig = dom.function(f).ok_or_else(|| PddlError::Undeclared {
                kind: "function",
                name: f.clone(),
            })?;
            check_args(dom, scope, objects, sig, args, ctx)
        }
        ExprAst::Add(xs) | ExprAst::Mul(xs) => xs
            .iter()
            .try_for_each(|x| check_expr(dom, scope, objects, x, ctx)),
        ExprAst::Sub(a, b) | ExprAst::Div(a, b) => {
            check_expr(dom, scope, objects, a, ctx)?;
            check_expr(dom, scope, objects, b, ctx)
        }
        ExprAst::Neg(a) => check_expr(dom, scope, objects, a, ctx),
    }
}

pub(crate) fn check_condition(
    dom: &DomainAst,
    scope: &HashMap<String, String>,
    objects: &HashMap<String, String>,
    c: &ConditionAst,
    ctx: &str,
) -> Result<(), PddlError> {
    match c {
        ConditionAst::Atom(a) => {
            let sig = dom.predicate(&a.pred).ok_or_else(|| PddlError::Undeclared {
                kind: "predicate",
                name: a.pred.clone(),
            })?;
            check_args(dom, scope, objects, sig, &a.args, ctx)
        }
        ConditionAst::Compare(_, l, r) => {
            check_expr(dom, scope, objects, l, ctx)?;
            check_expr(dom, scope, objects, r, ctx)
        }
    }
}

fn validate_domain(dom: &DomainAst) -> Result<(), PddlError> {
    for (t, parent) in &dom.types {
        if !dom.has_type(parent) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: parent.clone(),
            });
        }
        if t == "object" {
            return Err(PddlError::Invalid("type `object` cannot be redeclared".into()));
        }
    }
    for sig in dom.predicates.iter().chain(&dom.functions) {
        check_params(dom, &sig.params, &sig.name)?;
    }
    let constants: HashMap<String, String> = dom.constants.iter().cloned().collect();
    for a in &dom.actions {
        check_params(dom, &a.params, &a.name)?;
        let scope: HashMap<String, String> = a.params.iter().cloned().collect();
        for c in &a.precondition {
            check_condition(dom, &scope, &constants, c, &a.name)?;
        }
        for e in &a.effects {
            match e {
                EffectAst::Add(at) | EffectAst::Del(at) => {
                    check_condition(dom, &scope, &constants, &ConditionAst::Atom(at.clone()), &a.name)?
                }
                EffectAst::Numeric(_, f, args, rhs) => {
                    check_expr(dom, &scope, &constants, &ExprAst::Fluent(f.clone(), args.clone()), &a.name)?;
                    check_expr(dom, &scope, &constants, rhs, &a.name)?;
                }
            }
        }
    }
    Ok(())
}

fn define_body<'a>(text: &str, root: &'a Sexpr, kind: &str) -> Result<(&'a [Sexpr], String), PddlError> {
    let _ = text;
    let items = expect_list(root, "`(define ...)`")?;
    if root.head() != Some("define") {
        return Err(syntax(root.pos(), "`define`", root.describe()));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("`({kind} <name>)`"), "end of list"))?;
    let h = expect_list(header, &format!("`({kind} <name>)`"))?;
    if header.head() != Some(kind) || h.len() != 2 {
        return Err(syntax(header.pos(), format!("`({kind} <name>)`"), header.describe()));
    }
    let name = expect_atom(&h[1], "a name")?.to_string();
    Ok((&items[2..], name))
}

/// Parses a domain file.
pub fn parse_domain(text: &str) -> Result<DomainAst, PddlError> {
    let root = sexpr::parse(text)?;
    let (sections, name) = define_body(text, &root, "domain")?;
    let mut dom = DomainAst {
        name,
        ..Default::default()
    };
    for sec in sections {
        let items = expect_list(sec, "a domain section")?;
        let key = items
            .first()
            .and_then(|h| h.atom())
            .ok_or_else(|| syntax(sec.pos(), "a section keyword", sec.describe()))?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    let r = expect_atom(r, "a requirement flag")?;
                    if !ACCEPTED_REQUIREMENTS.contains(&r) {
                        return Err(unsupported(r, sec));
                    }
                    dom.requirements.push(r.to_string());
                }
            }
            ":types" => dom.types = typed_list(&items[1..], false)?,
            ":constants" => dom.constants = typed_list(&items[1..], false)?,
            ":predicates" => dom.predicates = signatures(&items[1..])?,
            ":functions" => dom.functions = signatures(&items[1..])?,
            ":action" => dom.actions.push(action(items, sec)?),
            ":durative-action" | ":derived" | ":process" | ":event" | ":constraints" => {
                return Err(unsupported(key, sec))
            }
            other => return Err(syntax(sec.pos(), "a domain section", format!("`{other}`"))),
        }
    }
    validate_domain(&dom)?;
    Ok(dom)
}

/// Parses a problem file against `dom`.
pub fn parse_problem(text: &str, dom: &DomainAst) -> Result<ProblemAst, PddlError> {
    let root = sexpr::parse(text)?;
    let (sections, name) = define_body(text, &root, "problem")?;
    let mut prob = ProblemAst {
        name,
        ..Default::default()
    };
    let mut goal_seen = false;
    for sec in sections {
        let items = expect_list(sec, "a problem section")?;
        let key = items
            .first()
            .and_then(|h| h.atom())
            .ok_or_else(|| syntax(sec.pos(), "a section keyword", sec.describe()))?;
        match key {
            ":domain" => {
                prob.domain = expect_atom(
                    items.get(1).ok_or_else(|| syntax(sec.pos(), "a domain name", "end of list"))?,
                    "a domain name",
                )?
                .to_string();
                if prob.domain != dom.name {
                    return Err(PddlError::Invalid(format!(
                        "problem is for domain `{}` but domain `{}` was given",
                        prob.domain, dom.name
                    )));
                }
            }
            ":requirements" => {}
            ":objects" => prob.objects = typed_list(&items[1..], false)?,
            ":init" => {
                for e in &items[1..] {
                    let l = expect_list(e, "an initial fact or value")?;
                    if e.head() == Some("=") {
                        if l.len() != 3 {
                            return Err(syntax(e.pos(), "`(= (f ...) <number>)`", e.describe()));
                        }
                        let (f, args) = match expr(&l[1])? {
                            ExprAst::Fluent(f, args) => (f, args),
                            _ => return Err(syntax(l[1].pos(), "a function term", l[1].describe())),
                        };
                        let v = l[2]
                            .atom()
                            .and_then(parse_decimal)
                            .ok_or_else(|| syntax(l[2].pos(), "a number", l[2].describe()))?;
                        prob.init_values
                            .push((f, args.iter().map(|t| t.name().to_string()).collect(), v));
                    } else if e.head() == Some("not") {
                        return Err(unsupported("not", e));
                    } else {
                        let a = atom_ast(l, e)?;
                        prob.init_facts
                            .push((a.pred, a.args.iter().map(|t| t.name().to_string()).collect()));
                    }
                }
            }
            ":goal" => {
                goal_seen = true;
                let g = items
                    .get(1)
                    .ok_or_else(|| syntax(sec.pos(), "a goal condition", "end of list"))?;
                condition(g, &mut prob.goal)?;
            }
            ":metric" => {}
            ":constraints" => return Err(unsupported(key, sec)),
            other => return Err(syntax(sec.pos(), "a problem section", format!("`{other}`"))),
        }
    }
    if !goal_seen {
        return Err(syntax(root.pos(), "a `:goal` section", "none"));
    }
    validate_problem(&prob, dom)?;
    Ok(prob)
}

fn validate_problem(prob: &ProblemAst, dom: &DomainAst) -> Result<(), PddlError> {
    let mut objects: HashMap<String, String> = dom.constants.iter().cloned().collect();
    for (o, t) in &prob.objects {
        if !dom.has_type(t) {
            return Err(PddlError::Undeclared {
                kind: "type",
                name: t.clone(),
            });
        }
        objects.insert(o.clone(), t.clone());
    }
    let empty = HashMap::new();
    let as_terms = |args: &[String]| args.iter().map(|a| Term::Const(a.clone())).collect::<Vec<_>>();
    for (p, args) in &prob.init_facts {
        check_condition(
            dom,
            &empty,
            &objects,
            &ConditionAst::Atom(AtomAst {
                pred: p.clone(),
                args: as_terms(args),
            }),
            "the initial state",
        )?;
    }
    for (f, args, _) in &prob.init_values {
        check_expr(dom, &empty, &objects, &ExprAst::Fluent(f.clone(), as_terms(args)), "the initial state")?;
    }
    for g in &prob.goal {
        check_condition(dom, &empty, &objects, g, "the goal")?;
    }
    // nullary functions used anywhere need a value up front
    let mut used: HashSet<&str> = HashSet::new();
    fn collect<'a>(e: &'a ExprAst, out: &mut HashSet<&'a str>) {
        match e {
            ExprAst::Fluent(f, args) if args.is_empty() => {
                out.insert(f);
            }
            ExprAst::Add(xs) | ExprAst::Mul(xs) => xs.iter().for_each(|x| collect(x, out)),
            ExprAst::Sub(a, b) | ExprAst::Div(a, b) => {
                collect(a, out);
                collect(b, out);
            }
            ExprAst::Neg(a) => collect(a, out),
            _ => {}
        }
    }
    for a in &dom.actions {
        for c in &a.precondition {
            if let ConditionAst::Compare(_, l, r) = c {
                collect(l, &mut used);
                collect(r, &mut used);
            }
        }
        for e in &a.effects {
            if let EffectAst::Numeric(_, f, args, rhs) = e {
                if args.is_empty() {
                    used.insert(f);
                }
                collect(rhs, &mut used);
            }
        }
    }
    for g in &prob.goal {
        if let ConditionAst::Compare(_, l, r) = g {
            collect(l, &mut used);
            collect(r, &mut used);
        }
    }
    let mut used: Vec<&str> = used.into_iter().collect();
    used.sort_unstable();
    for f in used {
        if !prob.init_values.iter().any(|(g, args, _)| g == f && args.is_empty()) {
            return Err(PddlError::MissingInitialValue(format!("({f})")));
        }
    }
    Ok(())
}
