//! Annotated terms of the Church-style calculus and its memory extension.
//!
//! Bound variables are de Bruijn indices; binders keep a name hint that only
//! the printer looks at. Structural equality, ordering and hashing therefore
//! coincide with α-equivalence. Every node caches its synthesized type (if it
//! has one), the annotations of its loose bound variables, its weight and its
//! size, so that typing questions on subterms are O(1).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::types::{SetType, Type};
use super::{Hint, Name, Position};

/// A variable occurrence: a de Bruijn index or a free name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Bound(u32),
    Free(Name),
}

/// The shape of a term. Tag order is `Var < Lam < App < Wrap`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    /// `x^A`
    Var(Var, Type),
    /// `λx^ā.t`
    Lam(Hint, SetType, Term),
    /// `t s̄`
    App(Term, SetTerm),
    /// `t⟨s̄⟩`
    Wrap(Term, SetTerm),
}

/// Loose bound-variable occurrences `(index, annotation)`, sorted, deduplicated.
#[derive(Clone, Default)]
struct Loose(Option<Arc<[(u32, Type)]>>);

impl Loose {
    fn from_vec(mut v: Vec<(u32, Type)>) -> Loose {
        if v.is_empty() {
            return Loose(None);
        }
        v.sort();
        v.dedup();
        Loose(Some(v.into()))
    }

    fn entries(&self) -> &[(u32, Type)] {
        self.0.as_deref().unwrap_or(&[])
    }

    fn max_index(&self) -> Option<u32> {
        self.entries().last().map(|(i, _)| *i)
    }
}

struct Node {
    kind: TermKind,
    ty: Option<Type>,
    loose: Loose,
    weight: usize,
    size: usize,
}

/// An annotated term (possibly containing wrappers).
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state)
    }
}

impl Term {
    fn from_kind(kind: TermKind) -> Term {
        let (ty, loose, weight, size) = match &kind {
            TermKind::Var(v, a) => {
                let loose = match v {
                    Var::Bound(i) => Loose::from_vec(vec![(*i, a.clone())]),
                    Var::Free(_) => Loose::default(),
                };
                (Some(a.clone()), loose, 0, 1)
            }
            TermKind::Lam(_, binder, body) => {
                let mut ok = !binder.is_empty();
                let mut rest = Vec::new();
                for (i, a) in body.0.loose.entries() {
                    if *i == 0 {
                        ok &= binder.contains(a);
                    } else {
                        rest.push((i - 1, a.clone()));
                    }
                }
                let ty = match (&body.0.ty, ok) {
                    (Some(b), true) => Some(Type::arrow(binder.clone(), b.clone())),
                    _ => None,
                };
                (ty, Loose::from_vec(rest), body.0.weight, body.0.size + 1)
            }
            TermKind::App(fun, arg) => {
                let ty = match (fun.0.ty.as_ref().and_then(Type::as_arrow), arg.set_type()) {
                    (Some((dom, cod)), Some(args)) if !arg.is_empty() && *dom == args => {
                        Some(cod.clone())
                    }
                    _ => None,
                };
                (ty, merge_loose(fun, arg), fun.0.weight + arg.weight(), fun.0.size + arg.size() + 1)
            }
            TermKind::Wrap(head, payload) => {
                let ty = match (&head.0.ty, payload.set_type()) {
                    (Some(a), Some(_)) => Some(a.clone()),
                    _ => None,
                };
                (
                    ty,
                    merge_loose(head, payload),
                    head.0.weight + payload.weight() + 1,
                    head.0.size + payload.size() + 1,
                )
            }
        };
        Term(Arc::new(Node { kind, ty, loose, weight, size }))
    }

    pub fn free(name: impl Into<Name>, ty: Type) -> Term {
        Term::from_kind(TermKind::Var(Var::Free(name.into()), ty))
    }

    pub fn bound(index: u32, ty: Type) -> Term {
        Term::from_kind(TermKind::Var(Var::Bound(index), ty))
    }

    /// Builds `λ.body` where `body` already refers to the binder as index 0.
    pub fn lam(hint: impl Into<Name>, binder: SetType, body: Term) -> Term {
        Term::from_kind(TermKind::Lam(Hint::new(hint), binder, body))
    }

    /// Builds `λx^ā.body`, binding the free occurrences of `name` in `body`.
    pub fn abs(name: impl Into<Name>, binder: SetType, body: &Term) -> Term {
        let name = name.into();
        let body = body.abstract_free(&name, 0);
        Term::from_kind(TermKind::Lam(Hint(name), binder, body))
    }

    pub fn app(fun: Term, arg: SetTerm) -> Term {
        Term::from_kind(TermKind::App(fun, arg))
    }

    /// `t s` for `t {s}`.
    pub fn app1(fun: Term, arg: Term) -> Term {
        Term::app(fun, SetTerm::singleton(arg))
    }

    pub fn wrap(head: Term, payload: SetTerm) -> Term {
        Term::from_kind(TermKind::Wrap(head, payload))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// The type determined by the annotations, if the term is well formed.
    pub fn ty(&self) -> Option<&Type> {
        self.0.ty.as_ref()
    }

    /// Number of wrapper nodes.
    pub fn weight(&self) -> usize {
        self.0.weight
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_wrapper_free(&self) -> bool {
        self.0.weight == 0
    }

    /// True if the term mentions no de Bruijn index that escapes it.
    pub fn is_locally_closed(&self) -> bool {
        self.0.loose.0.is_none()
    }

    /// Annotations of the loose occurrences of index `i`.
    pub(crate) fn loose_types(&self, i: u32) -> impl Iterator<Item = &Type> {
        self.0.loose.entries().iter().filter(move |(j, _)| *j == i).map(|(_, a)| a)
    }

    pub(crate) fn has_loose_at_or_above(&self, cutoff: u32) -> bool {
        self.0.loose.max_index().is_some_and(|m| m >= cutoff)
    }

    pub(crate) fn has_loose_below(&self, bound: u32) -> bool {
        self.0.loose.entries().first().is_some_and(|(i, _)| *i < bound)
    }

    /// Typed, with every set-term inside well formed and every binder
    /// canonical and non-empty.
    pub fn is_well_formed(&self) -> bool {
        self.ty().is_some()
            && match self.kind() {
                TermKind::Var(..) => true,
                TermKind::Lam(_, b, body) => !b.is_empty() && b.is_canonical() && body.is_well_formed(),
                TermKind::App(f, s) | TermKind::Wrap(f, s) => f.is_well_formed() && s.is_well_formed(),
            }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.kind(), TermKind::Var(..))
    }

    pub fn is_lam(&self) -> bool {
        matches!(self.kind(), TermKind::Lam(..))
    }

    /// Decomposes `(λx^ā.body)L` into its wrapper list and abstraction parts.
    pub fn as_w_abstraction(&self) -> Option<WAbstraction<'_>> {
        let mut wrappers = Vec::new();
        let mut cur = self;
        loop {
            match cur.kind() {
                TermKind::Wrap(h, p) => {
                    wrappers.push(p.clone());
                    cur = h;
                }
                TermKind::Lam(hint, binder, body) => {
                    wrappers.reverse();
                    return Some(WAbstraction {
                        lam: cur,
                        hint,
                        binder,
                        body,
                        wrappers: WrapperList(wrappers),
                    });
                }
                _ => return None,
            }
        }
    }

    /// Strips all outermost wrappers.
    pub fn split_wrappers(&self) -> (&Term, WrapperList) {
        let mut wrappers = Vec::new();
        let mut cur = self;
        while let TermKind::Wrap(h, p) = cur.kind() {
            wrappers.push(p.clone());
            cur = h;
        }
        wrappers.reverse();
        (cur, WrapperList(wrappers))
    }

    /// Names of the free variables.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut |n, _| {
            out.insert(n.clone());
        });
        out
    }

    /// All free occurrences `x^A`, deduplicated.
    pub fn free_occurrences(&self) -> BTreeSet<(Name, Type)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut |n, a| {
            out.insert((n.clone(), a.clone()));
        });
        out
    }

    fn collect_free(&self, f: &mut impl FnMut(&Name, &Type)) {
        match self.kind() {
            TermKind::Var(Var::Free(n), a) => f(n, a),
            TermKind::Var(Var::Bound(_), _) => {}
            TermKind::Lam(_, _, body) => body.collect_free(f),
            TermKind::App(t, s) | TermKind::Wrap(t, s) => {
                t.collect_free(f);
                for e in s.iter() {
                    e.collect_free(f);
                }
            }
        }
    }

    /// Adds `d` to every loose index `>= cutoff`.
    pub(crate) fn shift(&self, d: u32, cutoff: u32) -> Term {
        if d == 0 || !self.has_loose_at_or_above(cutoff) {
            return self.clone();
        }
        match self.kind() {
            TermKind::Var(Var::Bound(i), a) => Term::bound(i + d, a.clone()),
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => {
                Term::from_kind(TermKind::Lam(h.clone(), b.clone(), body.shift(d, cutoff + 1)))
            }
            TermKind::App(t, s) => Term::app(t.shift(d, cutoff), s.map(|e| e.shift(d, cutoff))),
            TermKind::Wrap(t, s) => Term::wrap(t.shift(d, cutoff), s.map(|e| e.shift(d, cutoff))),
        }
    }

    /// Subtracts `d` from every loose index; `None` if some loose index is `< d`.
    pub(crate) fn unshift(&self, d: u32) -> Option<Term> {
        if self.has_loose_below(d) {
            return None;
        }
        Some(self.unshift_from(d, 0))
    }

    fn unshift_from(&self, d: u32, cutoff: u32) -> Term {
        if d == 0 || !self.has_loose_at_or_above(cutoff) {
            return self.clone();
        }
        match self.kind() {
            TermKind::Var(Var::Bound(i), a) if *i >= cutoff => Term::bound(i - d, a.clone()),
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => {
                Term::from_kind(TermKind::Lam(h.clone(), b.clone(), body.unshift_from(d, cutoff + 1)))
            }
            TermKind::App(t, s) => {
                Term::app(t.unshift_from(d, cutoff), s.map(|e| e.unshift_from(d, cutoff)))
            }
            TermKind::Wrap(t, s) => {
                Term::wrap(t.unshift_from(d, cutoff), s.map(|e| e.unshift_from(d, cutoff)))
            }
        }
    }

    /// Replaces the free name `name` by the index `depth` (counted from here).
    pub(crate) fn abstract_free(&self, name: &Name, depth: u32) -> Term {
        match self.kind() {
            TermKind::Var(Var::Free(n), a) if n == name => Term::bound(depth, a.clone()),
            TermKind::Var(Var::Bound(i), a) if *i >= depth => Term::bound(i + 1, a.clone()),
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => Term::from_kind(TermKind::Lam(
                h.clone(),
                b.clone(),
                body.abstract_free(name, depth + 1),
            )),
            TermKind::App(t, s) => Term::app(
                t.abstract_free(name, depth),
                s.map(|e| e.abstract_free(name, depth)),
            ),
            TermKind::Wrap(t, s) => Term::wrap(
                t.abstract_free(name, depth),
                s.map(|e| e.abstract_free(name, depth)),
            ),
        }
    }

    /// Opens a binder body: index 0 becomes the free name `name`, keeping its
    /// annotation, and the remaining loose indices drop by one.
    pub fn open(&self, name: &Name) -> Term {
        self.open_at(name, 0)
    }

    fn open_at(&self, name: &Name, depth: u32) -> Term {
        if !self.has_loose_at_or_above(depth) {
            return self.clone();
        }
        match self.kind() {
            TermKind::Var(Var::Bound(i), a) if *i == depth => Term::free(name.clone(), a.clone()),
            TermKind::Var(Var::Bound(i), a) if *i > depth => Term::bound(i - 1, a.clone()),
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => {
                Term::from_kind(TermKind::Lam(h.clone(), b.clone(), body.open_at(name, depth + 1)))
            }
            TermKind::App(t, s) => {
                Term::app(t.open_at(name, depth), s.map(|e| e.open_at(name, depth)))
            }
            TermKind::Wrap(t, s) => {
                Term::wrap(t.open_at(name, depth), s.map(|e| e.open_at(name, depth)))
            }
        }
    }

    /// Substitutes the set-term `arg` for the loose index 0 of a binder body.
    ///
    /// Each occurrence `x^A` is replaced by the unique element of `arg` whose
    /// type is `A`. Returns the first annotation with no matching element as
    /// the error.
    pub(crate) fn instantiate(&self, arg: &SetTerm) -> Result<Term, Type> {
        self.instantiate_at(arg, 0)
    }

    fn instantiate_at(&self, arg: &SetTerm, depth: u32) -> Result<Term, Type> {
        if !self.has_loose_at_or_above(depth) {
            return Ok(self.clone());
        }
        Ok(match self.kind() {
            TermKind::Var(Var::Bound(i), a) if *i == depth => match arg.element_of_type(a) {
                Some(s) => s.shift(depth, 0),
                None => return Err(a.clone()),
            },
            TermKind::Var(Var::Bound(i), a) if *i > depth => Term::bound(i - 1, a.clone()),
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => Term::from_kind(TermKind::Lam(
                h.clone(),
                b.clone(),
                body.instantiate_at(arg, depth + 1)?,
            )),
            TermKind::App(t, s) => {
                Term::app(t.instantiate_at(arg, depth)?, s.try_map(|e| e.instantiate_at(arg, depth))?)
            }
            TermKind::Wrap(t, s) => {
                Term::wrap(t.instantiate_at(arg, depth)?, s.try_map(|e| e.instantiate_at(arg, depth))?)
            }
        })
    }

    /// Replaces the free occurrences of `name` by elements of `arg` chosen by
    /// annotation.
    pub(crate) fn substitute_free(&self, name: &Name, arg: &SetTerm) -> Result<Term, Type> {
        self.substitute_free_at(name, arg, 0)
    }

    fn substitute_free_at(&self, name: &Name, arg: &SetTerm, depth: u32) -> Result<Term, Type> {
        Ok(match self.kind() {
            TermKind::Var(Var::Free(n), a) if n == name => match arg.element_of_type(a) {
                Some(s) => s.shift(depth, 0),
                None => return Err(a.clone()),
            },
            TermKind::Var(..) => self.clone(),
            TermKind::Lam(h, b, body) => Term::from_kind(TermKind::Lam(
                h.clone(),
                b.clone(),
                body.substitute_free_at(name, arg, depth + 1)?,
            )),
            TermKind::App(t, s) => Term::app(
                t.substitute_free_at(name, arg, depth)?,
                s.try_map(|e| e.substitute_free_at(name, arg, depth))?,
            ),
            TermKind::Wrap(t, s) => Term::wrap(
                t.substitute_free_at(name, arg, depth)?,
                s.try_map(|e| e.substitute_free_at(name, arg, depth))?,
            ),
        })
    }

    /// The child at `index`, numbered as in [`Position`].
    pub fn child(&self, index: usize) -> Option<&Term> {
        match self.kind() {
            TermKind::Var(..) => None,
            TermKind::Lam(_, _, body) => (index == 0).then_some(body),
            TermKind::App(t, s) | TermKind::Wrap(t, s) => {
                if index == 0 {
                    Some(t)
                } else {
                    s.elements().get(index - 1)
                }
            }
        }
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut cur = self;
        for &i in pos.path() {
            cur = cur.child(i)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos`, re-canonicalizing every set on the way
    /// up. Returns the new term and the position of the replacement in it.
    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<(Term, Position)> {
        let (t, path) = self.replace_path(pos.path(), new)?;
        Some((t, Position::new(path)))
    }

    fn replace_path(&self, path: &[usize], new: Term) -> Option<(Term, Vec<usize>)> {
        let Some((&i, rest)) = path.split_first() else {
            return Some((new, Vec::new()));
        };
        match self.kind() {
            TermKind::Var(..) => None,
            TermKind::Lam(h, b, body) => {
                if i != 0 {
                    return None;
                }
                let (nb, p) = body.replace_path(rest, new)?;
                Some((Term::from_kind(TermKind::Lam(h.clone(), b.clone(), nb)), prepend(0, p)))
            }
            TermKind::App(t, s) | TermKind::Wrap(t, s) => {
                let is_app = matches!(self.kind(), TermKind::App(..));
                let rebuild = |t: Term, s: SetTerm| if is_app { Term::app(t, s) } else { Term::wrap(t, s) };
                if i == 0 {
                    let (nt, p) = t.replace_path(rest, new)?;
                    Some((rebuild(nt, s.clone()), prepend(0, p)))
                } else {
                    let (ns, p) = s.replace_path(i - 1, rest, new)?;
                    Some((rebuild(t.clone(), ns), prepend_set(p)))
                }
            }
        }
    }
}

fn prepend(i: usize, mut p: Vec<usize>) -> Vec<usize> {
    p.insert(0, i);
    p
}

fn prepend_set(mut p: Vec<usize>) -> Vec<usize> {
    p[0] += 1;
    p
}

fn merge_loose(t: &Term, s: &SetTerm) -> Loose {
    if t.0.loose.0.is_none() && s.iter().all(|e| e.0.loose.0.is_none()) {
        return Loose::default();
    }
    let mut v: Vec<(u32, Type)> = t.0.loose.entries().to_vec();
    for e in s.iter() {
        v.extend(e.0.loose.entries().iter().cloned());
    }
    Loose::from_vec(v)
}

/// A w-abstraction `(λx^ā.body)L`, viewed through its parts.
pub struct WAbstraction<'a> {
    /// The bare abstraction node.
    pub lam: &'a Term,
    pub hint: &'a Hint,
    pub binder: &'a SetType,
    pub body: &'a Term,
    /// Wrappers from innermost to outermost.
    pub wrappers: WrapperList,
}

/// A finite set of terms, sorted and deduplicated up to α-equivalence.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetTerm(Arc<[Term]>);

impl SetTerm {
    pub fn new(mut terms: Vec<Term>) -> SetTerm {
        terms.sort();
        terms.dedup();
        SetTerm(terms.into())
    }

    pub fn singleton(t: Term) -> SetTerm {
        SetTerm(vec![t].into())
    }

    pub fn elements(&self) -> &[Term] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(Term::weight).sum()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(Term::size).sum()
    }

    /// The set of element types, provided every element is typed and the
    /// types are pairwise distinct.
    pub fn set_type(&self) -> Option<SetType> {
        let mut tys = Vec::with_capacity(self.len());
        for e in self.iter() {
            tys.push(e.ty()?.clone());
        }
        let n = tys.len();
        let set = SetType::new(tys);
        (set.len() == n).then_some(set)
    }

    /// The element whose synthesized type is `ty`.
    pub fn element_of_type(&self, ty: &Type) -> Option<&Term> {
        self.0.iter().find(|e| e.ty() == Some(ty))
    }

    pub fn map(&self, f: impl FnMut(&Term) -> Term) -> SetTerm {
        SetTerm::new(self.0.iter().map(f).collect())
    }

    pub fn try_map<E>(&self, f: impl FnMut(&Term) -> Result<Term, E>) -> Result<SetTerm, E> {
        Ok(SetTerm::new(self.0.iter().map(f).collect::<Result<_, _>>()?))
    }

    pub fn is_wrapper_free(&self) -> bool {
        self.0.iter().all(Term::is_wrapper_free)
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let (&i, rest) = pos.path().split_first()?;
        self.0.get(i)?.subterm(&Position::new(rest.to_vec()))
    }

    /// Replaces element `index`'s subterm at `rest`; returns the new set and
    /// the path (starting with the element's new index).
    fn replace_path(&self, index: usize, rest: &[usize], new: Term) -> Option<(SetTerm, Vec<usize>)> {
        let elem = self.0.get(index)?;
        let (ne, p) = elem.replace_path(rest, new)?;
        let mut elems: Vec<Term> = self.0.to_vec();
        elems[index] = ne.clone();
        let set = SetTerm::new(elems);
        let new_index = set.0.binary_search(&ne).ok()?;
        Some((set, prepend(new_index, p)))
    }

    /// Top-level replacement for set-term positions (`element index :: path`).
    pub fn replace_at(&self, pos: &Position, new: Term) -> Option<(SetTerm, Position)> {
        let (&i, rest) = pos.path().split_first()?;
        let (s, p) = self.replace_path(i, rest, new)?;
        Some((s, Position::new(p)))
    }

    /// Strictly sorted, hence duplicate-free.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// Non-empty, canonical, elements of pairwise distinct types, and every
    /// nested set likewise.
    pub fn is_well_formed(&self) -> bool {
        !self.is_empty() && self.is_canonical() && self.set_type().is_some() && self.iter().all(Term::is_well_formed)
    }
}

impl FromIterator<Term> for SetTerm {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        SetTerm::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SetTerm {
    type Item = &'a Term;
    type IntoIter = std::slice::Iter<'a, Term>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A list of wrappers `□⟨s̄1⟩…⟨s̄n⟩`, innermost first.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WrapperList(pub Vec<SetTerm>);

impl WrapperList {
    pub fn empty() -> WrapperList {
        WrapperList(Vec::new())
    }

    /// `t L`: attaches the wrappers left to right.
    pub fn apply(&self, t: Term) -> Term {
        self.0.iter().fold(t, |acc, p| Term::wrap(acc, p.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SetTerm> {
        self.0.iter()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|p| p.weight() + 1).sum()
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Type {
        Type::base("a")
    }
    fn b() -> Type {
        Type::base("b")
    }

    #[test]
    fn set_terms_deduplicate() {
        let xa = Term::free("x", a());
        let xb = Term::free("x", b());
        let s = SetTerm::new(vec![xa.clone(), xb.clone(), xa.clone()]);
        assert_eq!(s.elements(), &[xa, xb]);
        assert!(s.is_canonical());
    }

    #[test]
    fn alpha_equivalent_abstractions_are_equal() {
        let id_x = Term::abs("x", SetType::singleton(a()), &Term::free("x", a()));
        let id_y = Term::abs("y", SetType::singleton(a()), &Term::free("y", a()));
        assert_eq!(id_x, id_y);
        let id_b = Term::abs("x", SetType::singleton(b()), &Term::free("x", b()));
        assert_ne!(id_x, id_b);
    }

    #[test]
    fn cached_types() {
        let id = Term::abs("x", SetType::singleton(a()), &Term::free("x", a()));
        assert_eq!(id.ty(), Some(&Type::simple_arrow(a(), a())));
        let bad = Term::lam("x", SetType::singleton(a()), Term::bound(0, b()));
        assert_eq!(bad.ty(), None);
        let dup = Term::app1(
            Term::free("f", Type::simple_arrow(a(), b())),
            Term::free("y", a()),
        );
        assert_eq!(dup.ty(), Some(&b()));
        let two_a = Term::app(
            Term::free("f", Type::simple_arrow(a(), b())),
            SetTerm::new(vec![Term::free("y", a()), Term::free("z", a())]),
        );
        assert_eq!(two_a.ty(), None);
    }

    #[test]
    fn wrappers_attach_left_to_right() {
        let y = Term::free("y", b());
        let l = WrapperList(vec![
            SetTerm::singleton(Term::free("w", b())),
            SetTerm::singleton(Term::free("z", a())),
        ]);
        let t = l.apply(y.clone());
        assert_eq!(t.weight(), 2);
        let (core, back) = t.split_wrappers();
        assert_eq!(core, &y);
        assert_eq!(back, l);
        assert_eq!(WrapperList::empty().apply(y.clone()), y);
    }

    #[test]
    fn replace_reports_new_position() {
        let xa = Term::free("x", a());
        let za = Term::free("z", a());
        let f = Term::free("f", Type::arrow(SetType::new(vec![a(), b()]), a()));
        let t = Term::app(f, SetTerm::new(vec![xa.clone(), Term::free("y", b())]));
        // x^a sits at index 0 of the argument set; z^a replaces it and keeps sorting.
        let (t2, p) = t.replace_at(&Position::new(vec![1]), za.clone()).unwrap();
        assert_eq!(t2.subterm(&p), Some(&za));
        // zz^b sorts after y^b, so the replaced element moves to index 1.
        let (_, p2) = t.replace_at(&Position::new(vec![1]), Term::free("zz", b())).unwrap();
        assert_eq!(p2, Position::new(vec![2]));
    }
}
