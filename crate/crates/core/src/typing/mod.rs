//! Type synthesis and checking for annotated terms, refinement and erasure,
//! and the Curry-style derivation checker.

use thiserror::Error;

use crate::syntax::{Name, Position, SetTerm, SetType, Term, TermKind, Type, Var};

mod context;
pub mod curry;
mod erase;

pub use context::TypingContext;
pub use curry::{
    check_curry, decorate, decorate_set, erase_derivation, CurryDerivation, CurryJudgement, DerivationError, Judged, Rule,
};
pub use erase::{erase, erase_set, is_uniform, refines, refines_set};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("not typable at {position}: {reason}")]
    NotTypable { position: Position, reason: String },
    #[error("occurrence {name}^{ty} is not allowed by the context")]
    UnboundOrWrongAnnotation { name: Name, ty: Type },
    #[error("not uniform at {position}: set elements erase to different terms")]
    NotUniform { position: Position },
    #[error("wrapper at {position} has no type erasure")]
    WrapperPresent { position: Position },
}

/// The unique type determined by the annotations.
pub fn synthesize_type(t: &Term) -> Result<Type, TypeError> {
    match t.ty() {
        Some(a) => Ok(a.clone()),
        None => Err(diagnose(t, &mut Vec::new())),
    }
}

/// The set-type of a set-term: every element typed, types pairwise distinct.
pub fn synthesize_set_type(s: &SetTerm) -> Result<SetType, TypeError> {
    if let Some(tys) = s.set_type() {
        return Ok(tys);
    }
    Err(diagnose_set(s, &mut Vec::new(), 0).unwrap_or_else(|| TypeError::NotTypable {
        position: Position::root(),
        reason: "two elements have the same type".into(),
    }))
}

fn not_typable(path: &[usize], reason: String) -> TypeError {
    TypeError::NotTypable { position: Position::new(path.to_vec()), reason }
}

/// Finds the innermost failing node of an untypable term.
fn diagnose(t: &Term, path: &mut Vec<usize>) -> TypeError {
    match t.kind() {
        TermKind::Var(..) => unreachable!("variables always synthesize"),
        TermKind::Lam(_, binder, body) => {
            if body.ty().is_none() {
                path.push(0);
                return diagnose(body, path);
            }
            if binder.is_empty() {
                return not_typable(path, "abstraction with an empty binder".into());
            }
            let stray = body.loose_types(0).find(|a| !binder.contains(a)).cloned();
            let stray = stray.map(|a| a.to_string()).unwrap_or_default();
            not_typable(path, format!("bound occurrence of type {stray} is not in the binder {binder}"))
        }
        TermKind::App(f, s) => {
            if f.ty().is_none() {
                path.push(0);
                return diagnose(f, path);
            }
            if let Some(e) = diagnose_set(s, path, 1) {
                return e;
            }
            let fty = f.ty().unwrap();
            if s.is_empty() {
                return not_typable(path, "empty application argument".into());
            }
            let Some(args) = s.set_type() else {
                return not_typable(path, "two argument elements have the same type".into());
            };
            match fty.as_arrow() {
                None => not_typable(path, format!("function part has type {fty}, which is not an arrow")),
                Some((dom, _)) => not_typable(path, format!("function expects {dom} but the argument has {args}")),
            }
        }
        TermKind::Wrap(h, p) => {
            if h.ty().is_none() {
                path.push(0);
                return diagnose(h, path);
            }
            diagnose_set(p, path, 1)
                .unwrap_or_else(|| not_typable(path, "two wrapper payload elements have the same type".into()))
        }
    }
}

fn diagnose_set(s: &SetTerm, path: &mut Vec<usize>, offset: usize) -> Option<TypeError> {
    for (i, e) in s.iter().enumerate() {
        if e.ty().is_none() {
            path.push(offset + i);
            return Some(diagnose(e, path));
        }
    }
    None
}

/// `Γ ⊢ t : A`: synthesis plus an audit of the free occurrences.
pub fn check(ctx: &TypingContext, t: &Term) -> Result<Type, TypeError> {
    let ty = synthesize_type(t)?;
    audit(ctx, t.free_occurrences())?;
    Ok(ty)
}

/// `Γ ⊢ s̄ : ā`.
pub fn check_set(ctx: &TypingContext, s: &SetTerm) -> Result<SetType, TypeError> {
    let tys = synthesize_set_type(s)?;
    for e in s.iter() {
        audit(ctx, e.free_occurrences())?;
    }
    Ok(tys)
}

fn audit(ctx: &TypingContext, occs: impl IntoIterator<Item = (Name, Type)>) -> Result<(), TypeError> {
    for (name, ty) in occs {
        if !ctx.get(&name).contains(&ty) {
            return Err(TypeError::UnboundOrWrongAnnotation { name, ty });
        }
    }
    Ok(())
}

/// The least context under which `t` checks.
pub fn minimal_context(t: &Term) -> Result<TypingContext, TypeError> {
    synthesize_type(t)?;
    Ok(min_ctx(t))
}

pub fn minimal_context_set(s: &SetTerm) -> Result<TypingContext, TypeError> {
    synthesize_set_type(s)?;
    let mut out = TypingContext::new();
    for e in s.iter() {
        out = out.union(&min_ctx(e));
    }
    Ok(out)
}

/// A variable contributes itself, applications and sets take unions, and an
/// abstraction drops its binder (implicit here, since bound variables are
/// nameless).
fn min_ctx(t: &Term) -> TypingContext {
    match t.kind() {
        TermKind::Var(Var::Free(x), a) => [(x.clone(), a.clone())].into_iter().collect(),
        TermKind::Var(Var::Bound(_), _) => TypingContext::new(),
        TermKind::Lam(_, _, body) => min_ctx(body),
        TermKind::App(f, s) | TermKind::Wrap(f, s) => s.iter().fold(min_ctx(f), |acc, e| acc.union(&min_ctx(e))),
    }
}
