//! Refinement `t ⊑ M`, uniformity and type erasure.

use crate::syntax::{Position, SetTerm, Term, TermKind, UntypedKind, UntypedTerm, Var};

use super::TypeError;

/// The unique untyped term refined by `t`.
pub fn erase(t: &Term) -> Result<UntypedTerm, TypeError> {
    erase_at(t, &mut Vec::new())
}

/// Erasure of a non-empty set-term: all elements must erase alike.
pub fn erase_set(s: &SetTerm) -> Result<UntypedTerm, TypeError> {
    erase_set_at(s, &mut Vec::new(), 0)
}

fn erase_at(t: &Term, path: &mut Vec<usize>) -> Result<UntypedTerm, TypeError> {
    Ok(match t.kind() {
        TermKind::Var(Var::Free(x), _) => UntypedTerm::var(x.clone()),
        TermKind::Var(Var::Bound(i), _) => UntypedTerm::bound(*i),
        TermKind::Lam(h, _, body) => {
            path.push(0);
            let b = erase_at(body, path)?;
            path.pop();
            UntypedTerm::lam_nameless(h.clone(), b)
        }
        TermKind::App(f, s) => {
            path.push(0);
            let m = erase_at(f, path)?;
            path.pop();
            let n = erase_set_at(s, path, 1)?;
            UntypedTerm::app(m, n)
        }
        TermKind::Wrap(..) => return Err(TypeError::WrapperPresent { position: Position::new(path.clone()) }),
    })
}

fn erase_set_at(s: &SetTerm, path: &mut Vec<usize>, offset: usize) -> Result<UntypedTerm, TypeError> {
    let mut first: Option<UntypedTerm> = None;
    for (i, e) in s.iter().enumerate() {
        path.push(offset + i);
        let m = erase_at(e, path);
        let here = Position::new(path.clone());
        path.pop();
        let m = m?;
        match &first {
            None => first = Some(m),
            Some(f) if *f == m => {}
            Some(_) => return Err(TypeError::NotUniform { position: here }),
        }
    }
    first.ok_or_else(|| TypeError::NotUniform { position: Position::new(path.clone()) })
}

/// Wrapper-free terms that refine some untyped term.
pub fn is_uniform(t: &Term) -> bool {
    erase(t).is_ok()
}

/// `t ⊑ M`, by the four refinement rules.
pub fn refines(t: &Term, m: &UntypedTerm) -> bool {
    match (t.kind(), m.kind()) {
        (TermKind::Var(v, _), UntypedKind::Var(w)) => v == w,
        (TermKind::Lam(_, _, body), UntypedKind::Lam(_, mb)) => refines(body, mb),
        (TermKind::App(f, s), UntypedKind::App(mf, mn)) => refines(f, mf) && refines_set(s, mn),
        _ => false,
    }
}

/// `s̄ ⊑ N`: non-empty and every element refines `N`.
pub fn refines_set(s: &SetTerm, m: &UntypedTerm) -> bool {
    !s.is_empty() && s.iter().all(|e| refines(e, m))
}
