//! Typing strongly normalizing untyped terms by recursion on the inductive
//! characterization of strong normalization.
//!
//! Heads `x M1 … Mn` type their arguments and give `x` a matching arrow into a
//! fresh base. Abstractions bind every type their variable received, or a
//! fresh base if it received none. A head redex `(λx.P) N M1 … Mn` is typed
//! through its contractum: the copies of `N` in the typed contractum are
//! replaced by `x` again (one representative per type) and the redex is
//! rebuilt by head subject expansion.

use std::collections::BTreeMap;

use crate::syntax::{Name, SetTerm, SetType, Term, TermKind, Type, UntypedKind, UntypedTerm, Var};
use crate::typing::{check, minimal_context, minimal_context_set, refines, TypingContext};

use super::{is_sn, Fuel, OracleError, SnVerdict};

/// A typed refinement of an untyped term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inferred {
    pub term: Term,
    pub context: TypingContext,
    pub ty: Type,
}

/// Rebuilds `(λx^ā.body) s̄ s̄1 … s̄n` from the pieces of its contractum
/// `body{x := s̄} s̄1 … s̄n` and checks that both have the same type under `ctx`.
pub fn head_subject_expansion(
    body: &Term,
    x: &Name,
    binder: &SetType,
    arg: &SetTerm,
    args: &[SetTerm],
    ctx: &TypingContext,
) -> Result<Term, OracleError> {
    expand(x.clone(), body, x, binder, arg, args, ctx)
}

fn expand(
    hint: Name,
    body: &Term,
    x: &Name,
    binder: &SetType,
    arg: &SetTerm,
    args: &[SetTerm],
    ctx: &TypingContext,
) -> Result<Term, OracleError> {
    let contractum = body
        .substitute_free(x, arg)
        .map_err(|a| OracleError::Internal(format!("no substituent of type {a}")))?;
    let expected = check(ctx, &apply_all(contractum, args))?;
    let redex = Term::app(Term::lam(hint, binder.clone(), body.abstract_free(x, 0)), arg.clone());
    let expanded = apply_all(redex, args);
    let got = check(ctx, &expanded)?;
    if got != expected {
        return Err(OracleError::Internal(format!("expansion changed the type from {expected} to {got}")));
    }
    Ok(expanded)
}

fn apply_all(head: Term, args: &[SetTerm]) -> Term {
    args.iter().fold(head, |f, s| Term::app(f, s.clone()))
}

/// Types `m` if it is strongly normalizing within `fuel`. The result refines
/// `m` and is re-checked before it is returned.
pub fn infer_sn(m: &UntypedTerm, fuel: Fuel) -> Result<Inferred, OracleError> {
    if !m.is_locally_closed() {
        return Err(OracleError::Internal("input has dangling bound indices".into()));
    }
    match is_sn(m, fuel) {
        SnVerdict::Yes => {}
        SnVerdict::No => return Err(OracleError::NotSnWithinFuel("a reduction cycle is reachable".into())),
        SnVerdict::Unknown => {
            return Err(OracleError::NotSnWithinFuel(format!("the β-graph exceeds {} nodes", fuel.max_nodes)))
        }
    }
    let mut inf = Inferrer { bases: 0, vars: 0, calls: 0, budget: fuel.max_nodes.saturating_mul(m.size() + 1) };
    let term = inf.infer(m)?;
    if !refines(&term, m) {
        return Err(OracleError::Internal("inferred term does not refine the input".into()));
    }
    let context = minimal_context(&term)?;
    let ty = check(&context, &term)?;
    Ok(Inferred { term, context, ty })
}

struct Inferrer {
    bases: usize,
    vars: usize,
    calls: usize,
    budget: usize,
}

impl Inferrer {
    fn fresh_base(&mut self) -> Type {
        self.bases += 1;
        Type::base(format!("b{}", self.bases - 1))
    }

    /// Names that cannot clash with parsed identifiers.
    fn fresh_var(&mut self) -> Name {
        self.vars += 1;
        Name::from(format!("#v{}", self.vars - 1))
    }

    fn infer(&mut self, m: &UntypedTerm) -> Result<Term, OracleError> {
        self.calls += 1;
        if self.calls > self.budget {
            return Err(OracleError::NotSnWithinFuel(format!("inference exceeded {} calls", self.budget)));
        }
        let (head, args) = m.spine();
        match head.kind() {
            UntypedKind::Var(Var::Free(x)) => {
                let typed: Vec<Term> = args.iter().map(|a| self.infer(a)).collect::<Result<_, _>>()?;
                let mut ty = self.fresh_base();
                for t in typed.iter().rev() {
                    ty = Type::arrow(SetType::singleton(typed_of(t)?), ty);
                }
                Ok(typed.into_iter().fold(Term::free(x.clone(), ty), Term::app1))
            }
            UntypedKind::Var(Var::Bound(_)) => Err(OracleError::Internal("dangling bound index".into())),
            UntypedKind::Lam(h, body) if args.is_empty() => {
                let v = self.fresh_var();
                let t = self.infer(&body.open(&v))?;
                let mut binder: Vec<Type> =
                    t.free_occurrences().into_iter().filter(|(n, _)| *n == v).map(|(_, a)| a).collect();
                if binder.is_empty() {
                    binder.push(self.fresh_base());
                }
                Ok(Term::lam(h.name().clone(), SetType::new(binder), t.abstract_free(&v, 0)))
            }
            UntypedKind::Lam(h, body) => {
                let v = self.fresh_var();
                let rest: Vec<UntypedTerm> = args[1..].iter().map(|a| (*a).clone()).collect();
                let marked = UntypedTerm::apps(body.open(&v), rest);
                let contractum = marked.substitute_free(&v, args[0]);
                let typed = self.infer(&contractum)?;
                let mut copies = BTreeMap::new();
                let unsubstituted = unsubstitute(&typed, &marked, &v, &mut copies)?;
                if copies.is_empty() {
                    let n = self.infer(args[0])?;
                    copies.insert(typed_of(&n)?, n);
                }
                let binder = SetType::new(copies.keys().cloned().collect());
                let arg = SetTerm::new(copies.into_values().collect());
                let (core, sets) = peel(&unsubstituted, args.len() - 1)?;
                let ctx = minimal_context(&typed)?.union(&minimal_context_set(&arg)?);
                expand(h.name().clone(), &core, &v, &binder, &arg, &sets, &ctx)
            }
            UntypedKind::App(..) => unreachable!("spine heads are not applications"),
        }
    }
}

fn typed_of(t: &Term) -> Result<Type, OracleError> {
    t.ty().cloned().ok_or_else(|| OracleError::Internal(format!("inferred an ill-typed subterm {t}")))
}

/// Replaces the subterms of `t` facing `v` in `marked` by `v` at their type,
/// keeping the smallest copy of each type.
fn unsubstitute(
    t: &Term,
    marked: &UntypedTerm,
    v: &Name,
    copies: &mut BTreeMap<Type, Term>,
) -> Result<Term, OracleError> {
    let mismatch = || OracleError::Internal("typed contractum does not follow the untyped one".into());
    if matches!(marked.kind(), UntypedKind::Var(Var::Free(n)) if n == v) {
        let a = typed_of(t)?;
        let entry = copies.entry(a.clone()).or_insert_with(|| t.clone());
        if t < entry {
            *entry = t.clone();
        }
        return Ok(Term::free(v.clone(), a));
    }
    Ok(match (t.kind(), marked.kind()) {
        (TermKind::Var(..), UntypedKind::Var(_)) => t.clone(),
        (TermKind::Lam(h, b, body), UntypedKind::Lam(_, mb)) => {
            Term::lam(h.name().clone(), b.clone(), unsubstitute(body, mb, v, copies)?)
        }
        (TermKind::App(f, s), UntypedKind::App(mf, mn)) => {
            let f = unsubstitute(f, mf, v, copies)?;
            Term::app(f, s.try_map(|e| unsubstitute(e, mn, v, copies))?)
        }
        _ => return Err(mismatch()),
    })
}

/// Splits `core s̄1 … s̄n` into `core` and the argument sets.
fn peel(t: &Term, n: usize) -> Result<(Term, Vec<SetTerm>), OracleError> {
    let mut sets = Vec::with_capacity(n);
    let mut cur = t;
    for _ in 0..n {
        let TermKind::App(f, s) = cur.kind() else {
            return Err(OracleError::Internal("typed contractum lost an argument".into()));
        };
        sets.push(s.clone());
        cur = f;
    }
    sets.reverse();
    Ok((cur.clone(), sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_annotated, parse_set_term, parse_untyped};
    use crate::typing::erase;

    fn u(s: &str) -> UntypedTerm {
        parse_untyped(s).unwrap()
    }
    fn t(s: &str) -> Term {
        parse_annotated(s).unwrap()
    }
    fn fuel() -> Fuel {
        Fuel::nodes(1_000)
    }

    #[test]
    fn self_application() {
        let r = infer_sn(&u(r"\x. x x"), fuel()).unwrap();
        assert_eq!(r.term, t(r"\x:{{b0}->b1, b0}. x^({b0}->b1) x^b0"));
        assert_eq!(r.ty.to_string(), "{b0, b0 -> b1} -> b1");
        assert!(r.context.is_empty());
    }

    #[test]
    fn vacuous_redex() {
        let m = u(r"(\x. y) z");
        let r = infer_sn(&m, fuel()).unwrap();
        assert_eq!(erase(&r.term).unwrap(), m);
        assert_eq!(r.term, t(r"(\x:{b1}. y^b0) z^b1"));
    }

    #[test]
    fn duplicating_redex_collects_types() {
        let m = u(r"(\x. x x) (\y. y)");
        let r = infer_sn(&m, fuel()).unwrap();
        assert_eq!(erase(&r.term).unwrap(), m);
        let TermKind::App(_, arg) = r.term.kind() else { panic!() };
        assert_eq!(arg.len(), 2);
    }

    #[test]
    fn non_sn_inputs_fail() {
        let omega = r"(\x. x x) (\x. x x)";
        for s in [omega.to_string(), format!("{omega} y"), format!(r"(\x. y) ({omega})")] {
            assert!(matches!(infer_sn(&u(&s), fuel()), Err(OracleError::NotSnWithinFuel(_))), "{s}");
        }
    }

    #[test]
    fn expansion_cases() {
        let ctx = TypingContext::from_iter([(Name::from("z"), Type::base("a"))]);
        let x = Name::from("x");
        let a = SetType::singleton(Type::base("a"));
        let e = head_subject_expansion(&t("x^a"), &x, &a, &parse_set_term("{z^a}").unwrap(), &[], &ctx).unwrap();
        assert_eq!(e, t(r"(\x:{a}.x^a){z^a}"));

        let b = SetType::singleton(Type::base("b"));
        let ctx2 = ctx.union(&TypingContext::from_iter([(Name::from("w"), Type::base("b"))]));
        let e = head_subject_expansion(&t("z^a"), &x, &b, &parse_set_term("{w^b}").unwrap(), &[], &ctx2).unwrap();
        assert_eq!(e, t(r"(\x:{b}.z^a){w^b}"));

        let id = t(r"\y:{a}.y^a");
        let e = head_subject_expansion(
            &Term::lam("y", a.clone(), Term::bound(0, Type::base("a"))),
            &x,
            &b,
            &parse_set_term("{w^b}").unwrap(),
            &[parse_set_term("{z^a}").unwrap()],
            &ctx2,
        )
        .unwrap();
        assert_eq!(e, Term::app(Term::app(Term::lam("x", b, id), parse_set_term("{w^b}").unwrap()), parse_set_term("{z^a}").unwrap()));
        assert_eq!(e.ty(), Some(&Type::base("a")));
    }
}
