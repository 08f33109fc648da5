//! Pure λ-terms, nameless with printing hints.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{Hint, Name, Position, Var};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UntypedKind {
    Var(Var),
    Lam(Hint, UntypedTerm),
    App(UntypedTerm, UntypedTerm),
}

struct UNode {
    kind: UntypedKind,
    size: usize,
    /// One more than the largest loose index, 0 when locally closed.
    loose_bound: u32,
}

/// An untyped λ-term. Positions: abstraction body 0, function 0, argument 1.
#[derive(Clone)]
pub struct UntypedTerm(Arc<UNode>);

impl PartialEq for UntypedTerm {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for UntypedTerm {}

impl PartialOrd for UntypedTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UntypedTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl Hash for UntypedTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state)
    }
}

impl UntypedTerm {
    fn from_kind(kind: UntypedKind) -> UntypedTerm {
        let (size, loose_bound) = match &kind {
            UntypedKind::Var(Var::Bound(i)) => (1, i + 1),
            UntypedKind::Var(Var::Free(_)) => (1, 0),
            UntypedKind::Lam(_, b) => (b.0.size + 1, b.0.loose_bound.saturating_sub(1)),
            UntypedKind::App(f, a) => (f.0.size + a.0.size + 1, f.0.loose_bound.max(a.0.loose_bound)),
        };
        UntypedTerm(Arc::new(UNode { kind, size, loose_bound }))
    }

    pub fn var(name: impl Into<Name>) -> UntypedTerm {
        UntypedTerm::from_kind(UntypedKind::Var(Var::Free(name.into())))
    }

    pub fn bound(index: u32) -> UntypedTerm {
        UntypedTerm::from_kind(UntypedKind::Var(Var::Bound(index)))
    }

    /// `λname.body`, binding the free occurrences of `name` in `body`.
    pub fn lam(name: impl Into<Name>, body: &UntypedTerm) -> UntypedTerm {
        let name = name.into();
        let body = body.abstract_free(&name, 0);
        UntypedTerm::from_kind(UntypedKind::Lam(Hint(name), body))
    }

    /// `λ.body` where `body` already refers to the binder as index 0.
    pub fn lam_nameless(hint: Hint, body: UntypedTerm) -> UntypedTerm {
        UntypedTerm::from_kind(UntypedKind::Lam(hint, body))
    }

    pub fn app(fun: UntypedTerm, arg: UntypedTerm) -> UntypedTerm {
        UntypedTerm::from_kind(UntypedKind::App(fun, arg))
    }

    /// `head a1 … an`.
    pub fn apps(head: UntypedTerm, args: impl IntoIterator<Item = UntypedTerm>) -> UntypedTerm {
        args.into_iter().fold(head, UntypedTerm::app)
    }

    pub fn kind(&self) -> &UntypedKind {
        &self.0.kind
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_locally_closed(&self) -> bool {
        self.0.loose_bound == 0
    }

    /// Splits `h a1 … an` into `h` and the arguments.
    pub fn spine(&self) -> (&UntypedTerm, Vec<&UntypedTerm>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let UntypedKind::App(f, a) = cur.kind() {
            args.push(a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self.kind() {
            UntypedKind::Var(Var::Free(n)) => {
                out.insert(n.clone());
            }
            UntypedKind::Var(Var::Bound(_)) => {}
            UntypedKind::Lam(_, b) => b.collect_free(out),
            UntypedKind::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    /// True if the loose index `i` occurs.
    pub fn mentions_index(&self, i: u32) -> bool {
        if self.0.loose_bound <= i {
            return false;
        }
        match self.kind() {
            UntypedKind::Var(Var::Bound(j)) => *j == i,
            UntypedKind::Var(_) => false,
            UntypedKind::Lam(_, b) => b.mentions_index(i + 1),
            UntypedKind::App(f, a) => f.mentions_index(i) || a.mentions_index(i),
        }
    }

    pub(crate) fn abstract_free(&self, name: &Name, depth: u32) -> UntypedTerm {
        match self.kind() {
            UntypedKind::Var(Var::Free(n)) if n == name => UntypedTerm::bound(depth),
            UntypedKind::Var(Var::Bound(i)) if *i >= depth => UntypedTerm::bound(i + 1),
            UntypedKind::Var(_) => self.clone(),
            UntypedKind::Lam(h, b) => UntypedTerm::lam_nameless(h.clone(), b.abstract_free(name, depth + 1)),
            UntypedKind::App(f, a) => UntypedTerm::app(f.abstract_free(name, depth), a.abstract_free(name, depth)),
        }
    }

    fn shift(&self, d: u32, cutoff: u32) -> UntypedTerm {
        if d == 0 || self.0.loose_bound <= cutoff {
            return self.clone();
        }
        match self.kind() {
            UntypedKind::Var(Var::Bound(i)) => UntypedTerm::bound(i + d),
            UntypedKind::Var(_) => self.clone(),
            UntypedKind::Lam(h, b) => UntypedTerm::lam_nameless(h.clone(), b.shift(d, cutoff + 1)),
            UntypedKind::App(f, a) => UntypedTerm::app(f.shift(d, cutoff), a.shift(d, cutoff)),
        }
    }

    /// Opens a binder body with the free name `name`.
    pub fn open(&self, name: &Name) -> UntypedTerm {
        self.instantiate(&UntypedTerm::var(name.clone()))
    }

    /// `body[0 := arg]` for a binder body.
    pub fn instantiate(&self, arg: &UntypedTerm) -> UntypedTerm {
        self.instantiate_at(arg, 0)
    }

    fn instantiate_at(&self, arg: &UntypedTerm, depth: u32) -> UntypedTerm {
        if self.0.loose_bound <= depth {
            return self.clone();
        }
        match self.kind() {
            UntypedKind::Var(Var::Bound(i)) if *i == depth => arg.shift(depth, 0),
            UntypedKind::Var(Var::Bound(i)) => UntypedTerm::bound(i - 1),
            UntypedKind::Var(_) => self.clone(),
            UntypedKind::Lam(h, b) => UntypedTerm::lam_nameless(h.clone(), b.instantiate_at(arg, depth + 1)),
            UntypedKind::App(f, a) => UntypedTerm::app(f.instantiate_at(arg, depth), a.instantiate_at(arg, depth)),
        }
    }

    /// Replaces the free name `name` by `arg`.
    pub fn substitute_free(&self, name: &Name, arg: &UntypedTerm) -> UntypedTerm {
        self.abstract_free(name, 0).instantiate(arg)
    }

    pub fn child(&self, i: usize) -> Option<&UntypedTerm> {
        match (self.kind(), i) {
            (UntypedKind::Lam(_, b), 0) => Some(b),
            (UntypedKind::App(f, _), 0) => Some(f),
            (UntypedKind::App(_, a), 1) => Some(a),
            _ => None,
        }
    }

    pub fn subterm(&self, pos: &Position) -> Option<&UntypedTerm> {
        let mut cur = self;
        for &i in pos.path() {
            cur = cur.child(i)?;
        }
        Some(cur)
    }

    /// True if this term is a β-redex `(λx.M) N`.
    pub fn is_beta_redex(&self) -> bool {
        matches!(self.kind(), UntypedKind::App(f, _) if matches!(f.kind(), UntypedKind::Lam(..)))
    }

    /// β-redex positions in preorder.
    pub fn beta_redexes(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_redexes(&mut Vec::new(), &mut out);
        out
    }

    fn collect_redexes(&self, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        if self.is_beta_redex() {
            out.push(Position::new(path.clone()));
        }
        for i in 0..2 {
            if let Some(c) = self.child(i) {
                path.push(i);
                c.collect_redexes(path, out);
                path.pop();
            }
        }
    }

    /// Contracts the β-redex at `pos`.
    pub fn beta_step(&self, pos: &Position) -> Option<UntypedTerm> {
        self.rewrite(pos.path(), &|r| match r.kind() {
            UntypedKind::App(f, a) => match f.kind() {
                UntypedKind::Lam(_, body) => Some(body.instantiate(a)),
                _ => None,
            },
            _ => None,
        })
    }

    /// All one-step β-reducts, in redex position order.
    pub fn beta_reducts(&self) -> Vec<(Position, UntypedTerm)> {
        self.beta_redexes()
            .into_iter()
            .map(|p| {
                let r = self.beta_step(&p).expect("enumerated redex");
                (p, r)
            })
            .collect()
    }

    fn rewrite(&self, path: &[usize], f: &dyn Fn(&UntypedTerm) -> Option<UntypedTerm>) -> Option<UntypedTerm> {
        let Some((&i, rest)) = path.split_first() else {
            return f(self);
        };
        match (self.kind(), i) {
            (UntypedKind::Lam(h, b), 0) => Some(UntypedTerm::lam_nameless(h.clone(), b.rewrite(rest, f)?)),
            (UntypedKind::App(g, a), 0) => Some(UntypedTerm::app(g.rewrite(rest, f)?, a.clone())),
            (UntypedKind::App(g, a), 1) => Some(UntypedTerm::app(g.clone(), a.rewrite(rest, f)?)),
            _ => None,
        }
    }
}

impl fmt::Debug for UntypedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
