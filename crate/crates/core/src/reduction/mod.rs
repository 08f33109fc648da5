//! Substitution, i- and im-reduction, forgetful reduction, parallel
//! reduction with complete developments, and the bridge to β-reduction.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{Name, Position, SetTerm, SetType, Term, TermKind, Type, WrapperList};
use crate::typing::{check, check_set, synthesize_type, TypeError, TypingContext};

mod parallel;
mod simulation;

pub use parallel::{par_reduces, par_reduces_set};
pub use simulation::{default_project_budget, erase_position, project_step, project_step_with_budget, simulate_beta, Simulation};

/// Which reduction relation on annotated terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    /// Reduction without memory (`→i`): only bare abstractions form redexes.
    I,
    /// Reduction with memory (`→im`): redexes may have wrappers between the
    /// abstraction and the argument, and contraction records the argument.
    Im,
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Calculus::I => "i",
            Calculus::Im => "im",
        })
    }
}

impl FromStr for Calculus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "i" => Ok(Calculus::I),
            "im" => Ok(Calculus::Im),
            _ => Err(format!("unknown calculus `{s}` (expected i or im)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("no redex at {position}")]
    NotARedex { position: Position },
    #[error("no subterm at {position}")]
    InvalidPosition { position: Position },
    #[error("ill-typed input: {0}")]
    IllTyped(#[from] TypeError),
    #[error("no element of the argument has type {0}")]
    MissingSubstituent(Type),
    #[error("the i-calculus works on wrapper-free terms; found a wrapper at {position}")]
    WrappersNotAllowed { position: Position },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no completing reduction found within a budget of {budget} expansions")]
    SearchBudgetExceeded { budget: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// An applied w-abstraction `(λx^ā.t)L s̄`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Redex {
    /// Position of the application node.
    pub position: Position,
    pub binder_name: Name,
    pub binder: SetType,
    /// Wrappers between the abstraction and the argument.
    pub wrapper_count: usize,
    /// Height of the w-abstraction's type; `None` if the abstraction is ill-typed.
    pub degree: Option<usize>,
}

impl Redex {
    pub fn is_i_redex(&self) -> bool {
        self.wrapper_count == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Beta,
    I,
    Im,
    Forget,
    Parallel,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Beta => "beta",
            StepKind::I => "i",
            StepKind::Im => "im",
            StepKind::Forget => "forget",
            StepKind::Parallel => "parallel",
        }
    }
}

impl From<Calculus> for StepKind {
    fn from(c: Calculus) -> StepKind {
        match c {
            Calculus::I => StepKind::I,
            Calculus::Im => StepKind::Im,
        }
    }
}

/// One rewrite on annotated terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub position: Position,
    pub source: Term,
    pub target: Term,
}

/// `t{x^ā := s̄}`: replaces each free `x^A` by the element of `s̄` of type `A`.
pub fn substitute(t: &Term, x: &Name, binder: &SetType, s: &SetTerm, ctx: &TypingContext) -> Result<Term, ReductionError> {
    let tys = check_set(ctx, s)?;
    if tys != *binder {
        return Err(ReductionError::Precondition(format!("substituted set-term has type {tys}, expected {binder}")));
    }
    t.substitute_free(x, s).map_err(ReductionError::MissingSubstituent)
}

/// Set-term version of [`substitute`].
pub fn substitute_set(
    t: &SetTerm,
    x: &Name,
    binder: &SetType,
    s: &SetTerm,
    ctx: &TypingContext,
) -> Result<SetTerm, ReductionError> {
    t.try_map(|e| substitute(e, x, binder, s, ctx))
}

/// All im-redexes in preorder; the i-redexes are those with no wrappers.
pub fn redexes(t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    collect_redexes(t, &mut Vec::new(), &mut out);
    out
}

pub fn redexes_set(s: &SetTerm) -> Vec<Redex> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    for (i, e) in s.iter().enumerate() {
        path.push(i);
        collect_redexes(e, &mut path, &mut out);
        path.pop();
    }
    out
}

pub fn redexes_in(t: &Term, calculus: Calculus) -> Vec<Redex> {
    let mut rs = redexes(t);
    if calculus == Calculus::I {
        rs.retain(Redex::is_i_redex);
    }
    rs
}

fn redex_at(t: &Term, path: &[usize]) -> Option<Redex> {
    let TermKind::App(f, _) = t.kind() else { return None };
    let w = f.as_w_abstraction()?;
    Some(Redex {
        position: Position::new(path.to_vec()),
        binder_name: w.hint.name().clone(),
        binder: w.binder.clone(),
        wrapper_count: w.wrappers.len(),
        degree: w.lam.ty().map(Type::height),
    })
}

fn collect_redexes(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Redex>) {
    out.extend(redex_at(t, path));
    let mut i = 0;
    while let Some(c) = t.child(i) {
        path.push(i);
        collect_redexes(c, path, out);
        path.pop();
        i += 1;
    }
}

/// Contracts a redex node.
fn contract(r: &Term, calculus: Calculus, position: &Position) -> Result<Term, ReductionError> {
    let not_redex = || ReductionError::NotARedex { position: position.clone() };
    let TermKind::App(f, s) = r.kind() else { return Err(not_redex()) };
    let w = f.as_w_abstraction().ok_or_else(not_redex)?;
    if calculus == Calculus::I && !w.wrappers.is_empty() {
        return Err(not_redex());
    }
    let body = w.body.instantiate(s).map_err(ReductionError::MissingSubstituent)?;
    Ok(match calculus {
        Calculus::I => body,
        Calculus::Im => w.wrappers.apply(Term::wrap(body, s.clone())),
    })
}

fn first_wrapper(t: &Term) -> Option<Position> {
    if t.is_wrapper_free() {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = t;
    loop {
        if let TermKind::Wrap(..) = cur.kind() {
            return Some(Position::new(path));
        }
        let mut i = 0;
        while let Some(c) = cur.child(i) {
            if !c.is_wrapper_free() {
                break;
            }
            i += 1;
        }
        path.push(i);
        cur = cur.child(i)?;
    }
}

/// One step of the given calculus at `position`, reporting where the
/// contractum ended up after sets were re-canonicalized.
pub fn step_at(t: &Term, position: &Position, calculus: Calculus) -> Result<(Term, Position), ReductionError> {
    synthesize_type(t)?;
    if calculus == Calculus::I {
        if let Some(p) = first_wrapper(t) {
            return Err(ReductionError::WrappersNotAllowed { position: p });
        }
    }
    let r = t.subterm(position).ok_or_else(|| ReductionError::InvalidPosition { position: position.clone() })?;
    let c = contract(r, calculus, position)?;
    Ok(t.replace_at(position, c).expect("position resolved above"))
}

pub fn step(t: &Term, position: &Position, calculus: Calculus) -> Result<Term, ReductionError> {
    step_at(t, position, calculus).map(|(s, _)| s)
}

/// `(λx^ā.u) s̄ →i u{x := s̄}`
pub fn step_i(t: &Term, position: &Position) -> Result<Term, ReductionError> {
    step(t, position, Calculus::I)
}

/// `(λx^ā.u)L s̄ →im u{x := s̄}⟨s̄⟩L`
pub fn step_im(t: &Term, position: &Position) -> Result<Term, ReductionError> {
    step(t, position, Calculus::Im)
}

/// The im-step contracting the same redex as the i-step at `position`.
pub fn corresponding_step(t: &Term, position: &Position) -> Result<Term, ReductionError> {
    if let Some(p) = first_wrapper(t) {
        return Err(ReductionError::WrappersNotAllowed { position: p });
    }
    step_im(t, position)
}

/// Every one-step reduct, in redex position order. Ill-typed redexes that
/// cannot be contracted are skipped.
pub fn reducts(t: &Term, calculus: Calculus) -> Vec<(Position, Term)> {
    redexes_in(t, calculus)
        .into_iter()
        .filter_map(|r| {
            let sub = t.subterm(&r.position)?;
            let c = contract(sub, calculus, &r.position).ok()?;
            Some((r.position.clone(), t.replace_at(&r.position, c)?.0))
        })
        .collect()
}

/// All single `t⟨s̄⟩ ▷ t` reducts, by position of the dropped wrapper.
pub fn forgetful_reducts(t: &Term) -> Vec<(Position, Term)> {
    let mut positions = Vec::new();
    collect_wrappers(t, &mut Vec::new(), &mut positions);
    positions
        .into_iter()
        .map(|p| {
            let TermKind::Wrap(h, _) = t.subterm(&p).expect("collected").kind() else { unreachable!() };
            let (r, _) = t.replace_at(&p, h.clone()).expect("collected");
            (p, r)
        })
        .collect()
}

fn collect_wrappers(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
    if t.is_wrapper_free() {
        return;
    }
    if let TermKind::Wrap(..) = t.kind() {
        out.push(Position::new(path.clone()));
    }
    let mut i = 0;
    while let Some(c) = t.child(i) {
        path.push(i);
        collect_wrappers(c, path, out);
        path.pop();
        i += 1;
    }
}

/// Simultaneously contracts the redexes chosen by `select` (a development).
///
/// Redexes are offered in preorder of the source term. Arguments and bodies
/// are developed before substitution, as in the complete development.
pub fn develop(t: &Term, calculus: Calculus, select: &mut dyn FnMut(&Redex) -> bool) -> Result<Term, ReductionError> {
    Developer { calculus, select }.term(t, &mut Vec::new())
}

pub fn develop_set(
    s: &SetTerm,
    calculus: Calculus,
    select: &mut dyn FnMut(&Redex) -> bool,
) -> Result<SetTerm, ReductionError> {
    let mut d = Developer { calculus, select };
    d.set(s, &mut Vec::new(), 0)
}

struct Developer<'a> {
    calculus: Calculus,
    select: &'a mut dyn FnMut(&Redex) -> bool,
}

impl Developer<'_> {
    fn term(&mut self, t: &Term, path: &mut Vec<usize>) -> Result<Term, ReductionError> {
        Ok(match t.kind() {
            TermKind::Var(..) => t.clone(),
            TermKind::Lam(h, b, body) => {
                path.push(0);
                let nb = self.term(body, path)?;
                path.pop();
                Term::lam(h.name().clone(), b.clone(), nb)
            }
            TermKind::App(f, s) => {
                let chosen = match redex_at(t, path) {
                    Some(r) if self.calculus == Calculus::Im || r.is_i_redex() => (self.select)(&r),
                    _ => false,
                };
                if chosen {
                    return self.contract(f, s, path);
                }
                path.push(0);
                let nf = self.term(f, path)?;
                path.pop();
                Term::app(nf, self.set(s, path, 1)?)
            }
            TermKind::Wrap(h, p) => {
                path.push(0);
                let nh = self.term(h, path)?;
                path.pop();
                Term::wrap(nh, self.set(p, path, 1)?)
            }
        })
    }

    fn set(&mut self, s: &SetTerm, path: &mut Vec<usize>, offset: usize) -> Result<SetTerm, ReductionError> {
        let mut out = Vec::with_capacity(s.len());
        for (i, e) in s.iter().enumerate() {
            path.push(offset + i);
            out.push(self.term(e, path)?);
            path.pop();
        }
        Ok(SetTerm::new(out))
    }

    /// `(λx.u)L s̄` becomes `u'{x := s̄'}⟨s̄'⟩L'` (or `u'{x := s̄'}` for i).
    fn contract(&mut self, f: &Term, s: &SetTerm, path: &mut Vec<usize>) -> Result<Term, ReductionError> {
        let w = f.as_w_abstraction().expect("redex");
        let n = w.wrappers.len();
        // The abstraction sits under `n` wrapper heads below the function slot.
        path.push(0);
        path.extend(std::iter::repeat_n(0, n));
        path.push(0);
        let body = self.term(w.body, path)?;
        path.pop();
        // Walking back up from the abstraction meets the innermost wrapper first.
        let mut payloads = Vec::with_capacity(n);
        for k in 0..n {
            path.pop();
            payloads.push(self.set(&w.wrappers.0[k], path, 1)?);
        }
        path.pop();
        let arg = self.set(s, path, 1)?;
        let contractum = body.instantiate(&arg).map_err(ReductionError::MissingSubstituent)?;
        Ok(match self.calculus {
            Calculus::I => contractum,
            Calculus::Im => WrapperList(payloads).apply(Term::wrap(contractum, arg)),
        })
    }
}

/// `comp(t)`: the development of every visible redex.
pub fn complete_development(t: &Term, calculus: Calculus) -> Result<Term, ReductionError> {
    synthesize_type(t)?;
    if calculus == Calculus::I {
        if let Some(p) = first_wrapper(t) {
            return Err(ReductionError::WrappersNotAllowed { position: p });
        }
    }
    develop(t, calculus, &mut |_| true)
}

/// Checks `Γ ⊢ t : A` before and after a step (used by callers that track a
/// context explicitly).
pub fn step_checked(ctx: &TypingContext, t: &Term, position: &Position, calculus: Calculus) -> Result<Term, ReductionError> {
    let a = check(ctx, t)?;
    let s = step(t, position, calculus)?;
    let b = check(ctx, &s)?;
    debug_assert_eq!(a, b);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_annotated, parse_set_term};

    fn t(s: &str) -> Term {
        parse_annotated(s).unwrap()
    }
    fn root() -> Position {
        Position::root()
    }

    #[test]
    fn substitution_examples() {
        let ctx: TypingContext = [(Name::from("y"), Type::base("a"))].into_iter().collect();
        let sa = parse_set_term("{y^a}").unwrap();
        let a = SetType::singleton(Type::base("a"));
        assert_eq!(substitute(&t("x^a"), &"x".into(), &a, &sa, &ctx).unwrap(), t("y^a"));
        assert_eq!(substitute(&t("z^c"), &"x".into(), &a, &sa, &ctx).unwrap(), t("z^c"));
        let err = substitute(&t("x^b"), &"x".into(), &a, &sa, &ctx).unwrap_err();
        assert_eq!(err, ReductionError::MissingSubstituent(Type::base("b")));
    }

    #[test]
    fn redex_enumeration() {
        let rs = redexes(&t(r"(\x:{a}.x^a){y^a}"));
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].degree, Some(1));
        assert!(redexes(&t("x^a")).is_empty());
        let w = t(r"((\x:{a}.x^a)[w^b]){y^a}");
        let rs = redexes(&w);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].wrapper_count, 1);
        assert!(redexes_in(&w, Calculus::I).is_empty());
    }

    #[test]
    fn i_steps() {
        assert_eq!(step_i(&t(r"(\x:{a}.x^a){y^a}"), &root()).unwrap(), t("y^a"));
        assert_eq!(step_i(&t(r"(\x:{a}.z^b){y^a}"), &root()).unwrap(), t("z^b"));
        assert!(matches!(step_i(&t("x^a"), &root()), Err(ReductionError::NotARedex { .. })));
        assert!(matches!(step_i(&t("x^a {y^a}"), &root()), Err(ReductionError::IllTyped(_))));
    }

    #[test]
    fn im_steps() {
        assert_eq!(step_im(&t(r"(\x:{a}.z^b){y^a}"), &root()).unwrap(), t("z^b [y^a]"));
        let s1 = step_im(&t(r"(\x:{a}.\y:{b}.x^a) z^a w^b"), &Position::new(vec![0])).unwrap();
        assert_eq!(s1, t(r"(\y:{b}.z^a) [z^a] w^b"));
        assert_eq!(step_im(&s1, &root()).unwrap(), t("z^a [w^b] [z^a]"));
        assert_eq!(step_im(&t(r"((\x:{a}.x^a)[u^c]) {y^a}"), &root()).unwrap(), t("y^a [y^a] [u^c]"));
    }

    #[test]
    fn corresponding_steps() {
        let i_id = r"(\y:{a}.y^a)";
        let src = t(&format!(r"(\x:{{a -> a}}. z^((a -> a) -> (a -> a) -> b) x^(a -> a) x^(a -> a)) {i_id}"));
        let expected = t(&format!(r"(z^((a -> a) -> (a -> a) -> b) {i_id} {i_id}) [{i_id}]"));
        assert_eq!(corresponding_step(&src, &root()).unwrap(), expected);
        assert_eq!(corresponding_step(&t(r"(\x:{a}.x^a){y^a}"), &root()).unwrap(), t("y^a [y^a]"));
        assert!(corresponding_step(&t("y^a"), &root()).is_err());
    }

    #[test]
    fn forgetful_examples() {
        assert_eq!(forgetful_reducts(&t("y^a [w^b]")), vec![(root(), t("y^a"))]);
        let rs: Vec<Term> = forgetful_reducts(&t("y^b [z^a [w^b]]")).into_iter().map(|(_, r)| r).collect();
        assert_eq!(rs, vec![t("y^b"), t("y^b [z^a]")]);
        assert!(forgetful_reducts(&t("x^a")).is_empty());
    }

    #[test]
    fn complete_development_examples() {
        let r = t(r"(\x:{a}.x^a){y^a}");
        assert_eq!(complete_development(&r, Calculus::I).unwrap(), t("y^a"));
        assert_eq!(complete_development(&r, Calculus::Im).unwrap(), t("y^a [y^a]"));
        let nf = t(r"\x:{a}. f^(a -> a) x^a");
        assert_eq!(complete_development(&nf, Calculus::I).unwrap(), nf);
        // Nested redexes: the inner argument is developed before substitution.
        let n = t(r"(\x:{a}.x^a) ((\y:{a}.y^a) z^a)");
        assert_eq!(complete_development(&n, Calculus::I).unwrap(), t("z^a"));
        assert_eq!(complete_development(&n, Calculus::Im).unwrap(), t("z^a [z^a] [z^a [z^a]]"));
    }

    #[test]
    fn develop_reports_source_positions() {
        let n = t(r"((\w:{b}.\x:{a}.x^a) [u^c] v^b) ((\y:{a}.y^a) z^a)");
        let mut seen = Vec::new();
        develop(&n, Calculus::Im, &mut |r| {
            seen.push(r.position.clone());
            false
        })
        .unwrap();
        let all: Vec<Position> = redexes(&n).into_iter().map(|r| r.position).collect();
        assert_eq!(seen, all);
    }
}
