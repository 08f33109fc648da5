//! Explicit derivations of the Curry-style system and their translation to
//! and from annotated terms.
//!
//! A derivation is a tree of nodes, each naming its rule (`var`, `many`,
//! `intro`, `elim`) and its conclusion `Γ ⊢ M : A` or `Γ ⊢ M : ā`. The JSON
//! form is
//!
//! ```json
//! {"rule": "var", "ctx": {"x": ["a", "b"]}, "term": "x", "type": "a",
//!  "premises": [], "select": "a"}
//! ```
//!
//! where `type` is a string for term judgements and an array of strings for
//! set judgements (`many` nodes).

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::syntax::{
    parse_type, parse_untyped, Name, Position, SetTerm, SetType, Term, TermKind, Type, UntypedKind, UntypedTerm, Var,
};

use super::{check, erase, erase_set, synthesize_set_type, TypeError, TypingContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Var,
    Many,
    Intro,
    Elim,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::Many => "many",
            Rule::Intro => "intro",
            Rule::Elim => "elim",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "var" => Ok(Rule::Var),
            "many" => Ok(Rule::Many),
            "intro" => Ok(Rule::Intro),
            "elim" => Ok(Rule::Elim),
            _ => Err(format!("unknown rule `{s}`")),
        }
    }
}

/// The right-hand side of a judgement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Judged {
    Type(Type),
    Set(SetType),
}

impl fmt::Display for Judged {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judged::Type(a) => write!(f, "{a}"),
            Judged::Set(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurryJudgement {
    pub ctx: TypingContext,
    pub term: UntypedTerm,
    pub ty: Judged,
}

impl fmt::Display for CurryJudgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊢ {} : {}", self.ctx, self.term, self.ty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurryDerivation {
    pub rule: Rule,
    pub ctx: TypingContext,
    pub term: UntypedTerm,
    pub ty: Judged,
    pub premises: Vec<CurryDerivation>,
    /// The chosen `B ∈ Γ(x)` of a `var` node.
    pub select: Option<Type>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("invalid derivation at node {path} ({rule}): {reason}")]
    Invalid { path: Position, rule: Rule, reason: String },
    #[error("malformed derivation file: {0}")]
    Format(String),
}

impl CurryDerivation {
    pub fn judgement(&self) -> CurryJudgement {
        CurryJudgement { ctx: self.ctx.clone(), term: self.term.clone(), ty: self.ty.clone() }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(CurryDerivation::size).sum::<usize>()
    }

    pub fn to_json(&self) -> Value {
        let ty = match &self.ty {
            Judged::Type(a) => Value::String(a.to_string()),
            Judged::Set(s) => Value::Array(s.iter().map(|a| Value::String(a.to_string())).collect()),
        };
        let mut v = json!({
            "rule": self.rule.as_str(),
            "ctx": self.ctx.to_json(),
            "term": self.term.to_string(),
            "type": ty,
            "premises": self.premises.iter().map(CurryDerivation::to_json).collect::<Vec<_>>(),
        });
        if let Some(b) = &self.select {
            v["select"] = Value::String(b.to_string());
        }
        v
    }

    pub fn from_json(value: &Value) -> Result<CurryDerivation, DerivationError> {
        let fmt_err = |m: String| DerivationError::Format(m);
        let obj = value.as_object().ok_or_else(|| fmt_err("node must be a JSON object".into()))?;
        let field = |k: &str| obj.get(k).ok_or_else(|| fmt_err(format!("missing field `{k}`")));
        let rule: Rule = field("rule")?.as_str().ok_or_else(|| fmt_err("`rule` must be a string".into()))?.parse().map_err(fmt_err)?;
        let ctx = TypingContext::from_json(field("ctx")?).map_err(fmt_err)?;
        let term_text = field("term")?.as_str().ok_or_else(|| fmt_err("`term` must be a string".into()))?;
        let term = parse_untyped(term_text).map_err(|e| fmt_err(format!("term `{term_text}`: {e}")))?;
        let parse_ty = |v: &Value| -> Result<Type, DerivationError> {
            let s = v.as_str().ok_or_else(|| fmt_err("types must be strings".into()))?;
            parse_type(s).map_err(|e| fmt_err(format!("type `{s}`: {e}")))
        };
        let ty = match field("type")? {
            Value::Array(items) => Judged::Set(items.iter().map(parse_ty).collect::<Result<Vec<_>, _>>().map(SetType::new)?),
            other => Judged::Type(parse_ty(other)?),
        };
        let premises = match obj.get("premises") {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(ps)) => ps.iter().map(CurryDerivation::from_json).collect::<Result<_, _>>()?,
            Some(_) => return Err(fmt_err("`premises` must be an array".into())),
        };
        let select = obj.get("select").map(parse_ty).transpose()?;
        Ok(CurryDerivation { rule, ctx, term, ty, premises, select })
    }
}

/// Validates every node against its rule and returns the root judgement.
pub fn check_curry(d: &CurryDerivation) -> Result<CurryJudgement, DerivationError> {
    check_node(d, &mut Vec::new())?;
    Ok(d.judgement())
}

fn check_node(d: &CurryDerivation, path: &mut Vec<usize>) -> Result<(), DerivationError> {
    let fail = |reason: String| DerivationError::Invalid { path: Position::new(path.clone()), rule: d.rule, reason };
    let arity = match d.rule {
        Rule::Var => 0,
        Rule::Many => d.premises.len(),
        Rule::Intro => 1,
        Rule::Elim => 2,
    };
    if d.premises.len() != arity {
        return Err(fail(format!("expected {arity} premises, found {}", d.premises.len())));
    }
    if d.rule != Rule::Var && d.select.is_some() {
        return Err(fail("only var nodes carry `select`".into()));
    }
    match d.rule {
        Rule::Var => {
            let UntypedKind::Var(Var::Free(x)) = d.term.kind() else {
                return Err(fail(format!("subject `{}` is not a variable", d.term)));
            };
            let Judged::Type(b) = &d.ty else { return Err(fail("var concludes a type, not a set-type".into())) };
            if let Some(sel) = &d.select {
                if sel != b {
                    return Err(fail(format!("selected {sel} differs from the concluded {b}")));
                }
            }
            if !d.ctx.get(x).contains(b) {
                return Err(fail(format!("{b} ∉ Γ({x}) = {}", d.ctx.get(x))));
            }
        }
        Rule::Many => {
            let Judged::Set(tys) = &d.ty else { return Err(fail("many concludes a set-type".into())) };
            if d.premises.is_empty() {
                return Err(fail("many nodes with no premises are not accepted".into()));
            }
            let mut seen = Vec::new();
            for p in &d.premises {
                if p.ctx != d.ctx || p.term != d.term {
                    return Err(fail("premises must share the context and subject of the conclusion".into()));
                }
                let Judged::Type(a) = &p.ty else { return Err(fail("premises must conclude types".into())) };
                if seen.contains(a) {
                    return Err(fail(format!("two premises have the same type {a}")));
                }
                seen.push(a.clone());
            }
            if SetType::new(seen) != *tys {
                return Err(fail("concluded set-type differs from the premise types".into()));
            }
        }
        Rule::Intro => {
            let UntypedKind::Lam(_, body) = d.term.kind() else {
                return Err(fail(format!("subject `{}` is not an abstraction", d.term)));
            };
            let Judged::Type(arrow) = &d.ty else { return Err(fail("intro concludes a type".into())) };
            let Some((binder, cod)) = arrow.as_arrow() else {
                return Err(fail(format!("{arrow} is not an arrow type")));
            };
            let p = &d.premises[0];
            let new: Vec<&Name> = p.ctx.domain().filter(|x| !d.ctx.contains(x)).collect();
            let [x] = new.as_slice() else {
                return Err(fail("premise context must extend the conclusion's by exactly one variable".into()));
            };
            let x = (*x).clone();
            if p.ctx != d.ctx.extend(x.clone(), binder.clone()) {
                return Err(fail(format!("premise context must be Γ, {x}:{binder}")));
            }
            if d.term.free_names().contains(&x) {
                return Err(fail(format!("bound name {x} is free in the subject")));
            }
            if p.term != body.open(&x) {
                return Err(fail("premise subject is not the abstraction body".into()));
            }
            if p.ty != Judged::Type(cod.clone()) {
                return Err(fail(format!("premise must conclude {cod}")));
            }
        }
        Rule::Elim => {
            let UntypedKind::App(m, n) = d.term.kind() else {
                return Err(fail(format!("subject `{}` is not an application", d.term)));
            };
            let Judged::Type(b) = &d.ty else { return Err(fail("elim concludes a type".into())) };
            let (pf, pa) = (&d.premises[0], &d.premises[1]);
            if pf.ctx != d.ctx || pa.ctx != d.ctx {
                return Err(fail("premises must share the conclusion's context".into()));
            }
            if pf.term != *m || pa.term != *n {
                return Err(fail("premise subjects must be the function and the argument".into()));
            }
            let Judged::Type(fty) = &pf.ty else { return Err(fail("first premise must conclude a type".into())) };
            let Some((dom, cod)) = fty.as_arrow() else {
                return Err(fail(format!("function premise type {fty} is not an arrow")));
            };
            if cod != b {
                return Err(fail(format!("codomain {cod} differs from the concluded {b}")));
            }
            if pa.ty != Judged::Set(dom.clone()) || dom.is_empty() {
                return Err(fail(format!("argument premise must conclude the non-empty set-type {dom}")));
            }
        }
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, path)?;
        path.pop();
    }
    Ok(())
}

/// The annotated term encoding a derivation of a term judgement.
pub fn decorate(d: &CurryDerivation) -> Result<Term, DerivationError> {
    check_curry(d)?;
    if d.rule == Rule::Many {
        return Err(DerivationError::Invalid {
            path: Position::root(),
            rule: Rule::Many,
            reason: "a set judgement decorates to a set-term; use decorate_set".into(),
        });
    }
    Ok(dec(d))
}

/// The set-term encoding a derivation of a set judgement.
pub fn decorate_set(d: &CurryDerivation) -> Result<SetTerm, DerivationError> {
    check_curry(d)?;
    if d.rule != Rule::Many {
        return Err(DerivationError::Invalid {
            path: Position::root(),
            rule: d.rule,
            reason: "a term judgement decorates to a term; use decorate".into(),
        });
    }
    Ok(dec_set(d))
}

fn dec(d: &CurryDerivation) -> Term {
    match d.rule {
        Rule::Var => {
            let UntypedKind::Var(Var::Free(x)) = d.term.kind() else { unreachable!("checked") };
            let Judged::Type(b) = &d.ty else { unreachable!("checked") };
            Term::free(x.clone(), b.clone())
        }
        Rule::Intro => {
            let p = &d.premises[0];
            let x = p.ctx.domain().find(|x| !d.ctx.contains(x)).expect("checked").clone();
            Term::abs(x.clone(), p.ctx.get(&x), &dec(p))
        }
        Rule::Elim => Term::app(dec(&d.premises[0]), dec_set(&d.premises[1])),
        Rule::Many => unreachable!("handled by dec_set"),
    }
}

fn dec_set(d: &CurryDerivation) -> SetTerm {
    SetTerm::new(d.premises.iter().map(dec).collect())
}

/// The derivation of `Γ ⊢ erase(t) : A` that `t` encodes.
pub fn erase_derivation(ctx: &TypingContext, t: &Term) -> Result<CurryDerivation, TypeError> {
    check(ctx, t)?;
    erase(t)?;
    Ok(ed(ctx, t))
}

fn ed(ctx: &TypingContext, t: &Term) -> CurryDerivation {
    let term = erase(t).expect("uniform");
    let ty = Judged::Type(t.ty().expect("typed").clone());
    match t.kind() {
        TermKind::Var(Var::Free(_), b) => {
            CurryDerivation { rule: Rule::Var, ctx: ctx.clone(), term, ty, premises: vec![], select: Some(b.clone()) }
        }
        TermKind::Lam(h, binder, body) => {
            let free = t.free_names();
            let x = fresh_name(h.name(), |n| ctx.contains(n) || free.contains(n));
            let premise = ed(&ctx.extend(x.clone(), binder.clone()), &body.open(&x));
            CurryDerivation { rule: Rule::Intro, ctx: ctx.clone(), term, ty, premises: vec![premise], select: None }
        }
        TermKind::App(f, s) => {
            let premises = vec![ed(ctx, f), ed_set(ctx, s)];
            CurryDerivation { rule: Rule::Elim, ctx: ctx.clone(), term, ty, premises, select: None }
        }
        TermKind::Var(Var::Bound(_), _) | TermKind::Wrap(..) => unreachable!("locally closed and wrapper-free"),
    }
}

fn ed_set(ctx: &TypingContext, s: &SetTerm) -> CurryDerivation {
    CurryDerivation {
        rule: Rule::Many,
        ctx: ctx.clone(),
        term: erase_set(s).expect("uniform"),
        ty: Judged::Set(synthesize_set_type(s).expect("typed")),
        premises: s.iter().map(|e| ed(ctx, e)).collect(),
        select: None,
    }
}

/// `hint`, or `hint1`, `hint2`, … avoiding names for which `taken` holds.
pub(crate) fn fresh_name(hint: &str, taken: impl Fn(&str) -> bool) -> Name {
    let base = if hint.is_empty() || hint.starts_with('#') { "v" } else { hint };
    if !taken(base) {
        return base.into();
    }
    (1..).map(|k| format!("{base}{k}")).find(|n| !taken(n)).expect("unbounded").into()
}
