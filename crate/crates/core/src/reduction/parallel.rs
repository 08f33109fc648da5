//! Deciding parallel reduction `t ⇒ s`.
//!
//! The matcher walks the source and the target together. At a redex it
//! tries the congruence clause first and then the contraction clause. Under a
//! contracted abstraction the bound variable has no counterpart in the
//! target; each of its occurrences of type `A` must face the same target
//! subterm `w_A`, and the redex argument of type `A` must itself
//! parallel-reduce to `w_A`. Witnesses are recorded on first sight and undone
//! on backtracking.

use std::collections::HashMap;

use crate::syntax::{SetTerm, Term, TermKind, Type, Var};

use super::Calculus;

/// `t ⇒ s` in the given calculus.
pub fn par_reduces(t: &Term, s: &Term, calculus: Calculus) -> bool {
    Matcher::new(calculus).term(t, s, &mut Vec::new())
}

/// `t̄ ⇒ s̄`, elementwise.
pub fn par_reduces_set(t: &SetTerm, s: &SetTerm, calculus: Calculus) -> bool {
    Matcher::new(calculus).set(t, s, &mut Vec::new())
}

/// How a source binder appears in the target.
#[derive(Clone, Copy, Debug)]
enum Binder {
    /// Still an abstraction in the target.
    Kept,
    /// Contracted; the payload identifies the redex.
    Substituted(usize),
}

struct RedexRecord {
    args: SetTerm,
    env: Vec<Binder>,
}

struct Matcher {
    calculus: Calculus,
    redexes: Vec<RedexRecord>,
    witnesses: HashMap<(usize, Type), Term>,
    log: Vec<(usize, Type)>,
}

struct Snapshot {
    redexes: usize,
    log: usize,
}

fn kept_count(env: &[Binder]) -> u32 {
    env.iter().filter(|b| matches!(b, Binder::Kept)).count() as u32
}

impl Matcher {
    fn new(calculus: Calculus) -> Matcher {
        Matcher { calculus, redexes: Vec::new(), witnesses: HashMap::new(), log: Vec::new() }
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { redexes: self.redexes.len(), log: self.log.len() }
    }

    fn restore(&mut self, s: Snapshot) {
        for key in self.log.drain(s.log..) {
            self.witnesses.remove(&key);
        }
        self.redexes.truncate(s.redexes);
    }

    fn record(&mut self, key: (usize, Type), w: Term) {
        self.witnesses.insert(key.clone(), w);
        self.log.push(key);
    }

    fn term(&mut self, u: &Term, x: &Term, env: &mut Vec<Binder>) -> bool {
        match u.kind() {
            TermKind::Var(Var::Free(_), _) => u == x,
            TermKind::Var(Var::Bound(i), a) => self.bound(*i, a, x, env),
            TermKind::Lam(_, b, body) => match x.kind() {
                TermKind::Lam(_, b2, body2) if b == b2 => {
                    env.push(Binder::Kept);
                    let ok = self.term(body, body2, env);
                    env.pop();
                    ok
                }
                _ => false,
            },
            TermKind::Wrap(h, p) => match x.kind() {
                TermKind::Wrap(h2, p2) if self.calculus == Calculus::Im => self.term(h, h2, env) && self.set(p, p2, env),
                _ => false,
            },
            TermKind::App(f, s) => {
                let snap = self.snapshot();
                if let TermKind::App(f2, s2) = x.kind() {
                    if self.term(f, f2, env) && self.set(s, s2, env) {
                        return true;
                    }
                    self.restore(snap);
                }
                let snap = self.snapshot();
                if self.contraction(f, s, x, env) {
                    return true;
                }
                self.restore(snap);
                false
            }
        }
    }

    fn bound(&mut self, i: u32, a: &Type, x: &Term, env: &mut [Binder]) -> bool {
        let n = env.len();
        let i = i as usize;
        if i >= n {
            let target = (i - n) as u32 + kept_count(env);
            return matches!(x.kind(), TermKind::Var(Var::Bound(k), b) if *k == target && b == a);
        }
        let j = n - 1 - i;
        let inner = kept_count(&env[j + 1..]);
        match env[j] {
            Binder::Kept => matches!(x.kind(), TermKind::Var(Var::Bound(k), b) if *k == inner && b == a),
            Binder::Substituted(id) => {
                let Some(w) = x.unshift(inner) else { return false };
                let key = (id, a.clone());
                if let Some(prev) = self.witnesses.get(&key) {
                    return *prev == w;
                }
                let Some(arg) = self.redexes[id].args.element_of_type(a).cloned() else { return false };
                let mut arg_env = self.redexes[id].env.clone();
                self.record(key, w.clone());
                self.term(&arg, &w, &mut arg_env)
            }
        }
    }

    /// `(λx.u)L s̄ ⇒ u'{x := s̄'}⟨s̄'⟩L'` (im) or `(λx.u) s̄ ⇒ u'{x := s̄'}` (i).
    fn contraction(&mut self, f: &Term, s: &SetTerm, x: &Term, env: &mut Vec<Binder>) -> bool {
        let Some(w) = f.as_w_abstraction() else { return false };
        let id = self.redexes.len();
        match self.calculus {
            Calculus::I => {
                if !w.wrappers.is_empty() {
                    return false;
                }
                self.redexes.push(RedexRecord { args: s.clone(), env: env.clone() });
                env.push(Binder::Substituted(id));
                let ok = self.term(w.body, x, env);
                env.pop();
                ok
            }
            Calculus::Im => {
                let mut cur = x;
                for payload in w.wrappers.iter().rev() {
                    let TermKind::Wrap(h, q) = cur.kind() else { return false };
                    if !self.set(payload, q, env) {
                        return false;
                    }
                    cur = h;
                }
                let TermKind::Wrap(core, memo) = cur.kind() else { return false };
                if memo.len() != s.len() {
                    return false;
                }
                self.redexes.push(RedexRecord { args: s.clone(), env: env.clone() });
                for r in s.iter() {
                    let Some(a) = r.ty() else { return false };
                    let Some(m) = memo.element_of_type(a) else { return false };
                    self.record((id, a.clone()), m.clone());
                    if !self.term(r, m, env) {
                        return false;
                    }
                }
                env.push(Binder::Substituted(id));
                let ok = self.term(w.body, core, env);
                env.pop();
                ok
            }
        }
    }

    /// Elementwise matching; typed elements can only face elements of the
    /// same type, which makes the search deterministic on typed input.
    fn set(&mut self, s: &SetTerm, s2: &SetTerm, env: &mut Vec<Binder>) -> bool {
        if s.len() != s2.len() {
            return false;
        }
        let mut used = vec![false; s2.len()];
        self.set_from(s.elements(), s2.elements(), &mut used, env)
    }

    fn set_from(&mut self, rest: &[Term], targets: &[Term], used: &mut [bool], env: &mut Vec<Binder>) -> bool {
        let Some((e, rest)) = rest.split_first() else { return true };
        for k in 0..targets.len() {
            if used[k] {
                continue;
            }
            if let (Some(a), Some(b)) = (e.ty(), targets[k].ty()) {
                if a != b {
                    continue;
                }
            }
            let snap = self.snapshot();
            used[k] = true;
            if self.term(e, &targets[k], env) && self.set_from(rest, targets, used, env) {
                return true;
            }
            used[k] = false;
            self.restore(snap);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{complete_development, reducts};
    use crate::syntax::parse_annotated;

    fn t(s: &str) -> Term {
        parse_annotated(s).unwrap()
    }

    const NESTED: &str = r"(\x:{a}. f^(a -> a -> a) x^a x^a) ((\y:{a}.y^a) z^a)";

    #[test]
    fn reflexive_and_single_steps() {
        for c in [Calculus::I, Calculus::Im] {
            let n = t(NESTED);
            assert!(par_reduces(&n, &n, c));
            for (_, r) in reducts(&n, c) {
                assert!(par_reduces(&n, &r, c), "{n} => {r}");
            }
            assert!(par_reduces(&n, &complete_development(&n, c).unwrap(), c));
        }
    }

    #[test]
    fn created_redexes_are_not_parallel() {
        // (λx. x y)(λz.z) → (λz.z) y → y; the second redex is created.
        let n = t(r"(\x:{a -> a}. x^(a -> a) y^a) (\z:{a}. z^a)");
        assert!(par_reduces(&n, &t(r"(\z:{a}. z^a) y^a"), Calculus::I));
        assert!(!par_reduces(&n, &t("y^a"), Calculus::I));
    }

    #[test]
    fn copies_must_agree() {
        // Both occurrences of x must be replaced by the same reduct of the argument.
        let n = t(NESTED);
        let mixed = t(r"f^(a -> a -> a) z^a ((\y:{a}.y^a) z^a)");
        assert!(!par_reduces(&n, &mixed, Calculus::I));
        assert!(par_reduces(&n, &t(r"f^(a -> a -> a) z^a z^a"), Calculus::I));
        assert!(par_reduces(&n, &t(r"f^(a -> a -> a) ((\y:{a}.y^a) z^a) ((\y:{a}.y^a) z^a)"), Calculus::I));
    }

    #[test]
    fn memory_payload_fixes_the_argument_reduct() {
        let n = t(r"(\x:{a}. x^a) ((\y:{a}.y^a) z^a)");
        assert!(par_reduces(&n, &t("z^a [z^a] [z^a [z^a]]"), Calculus::Im));
        assert!(par_reduces(&n, &t(r"((\y:{a}.y^a) z^a) [(\y:{a}.y^a) z^a]"), Calculus::Im));
        assert!(!par_reduces(&n, &t(r"z^a [z^a] [(\y:{a}.y^a) z^a]"), Calculus::Im));
        assert!(!par_reduces(&n, &t("z^a"), Calculus::Im));
    }

    #[test]
    fn erased_arguments_are_unconstrained() {
        let n = t(r"(\x:{a}. w^b) ((\y:{a}.y^a) z^a)");
        assert!(par_reduces(&n, &t("w^b"), Calculus::I));
        assert!(par_reduces(&n, &t("w^b [z^a [z^a]]"), Calculus::Im));
    }

    #[test]
    fn open_terms_under_binders() {
        let n = t(r"\v:{a}. (\x:{a}. \u:{b}. x^a) v^a");
        assert!(par_reduces(&n, &t(r"\v:{a}. \u:{b}. v^a"), Calculus::I));
        assert!(!par_reduces(&n, &t(r"\v:{a}. \u:{b}. q^a"), Calculus::I));
        assert!(par_reduces(&n, &t(r"\v:{a}. (\u:{b}. v^a) [v^a]"), Calculus::Im));
    }
}
