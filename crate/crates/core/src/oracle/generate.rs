//! Seeded random untyped terms and typed corpora built from them.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Name, UntypedTerm};

use super::{infer_sn, is_sn, Fuel, Inferred, SnVerdict};

/// A random term with exactly `size` nodes. Variables are drawn mostly from
/// the enclosing binders and otherwise from `free` (or `y` if `free` is
/// empty).
pub fn random_untyped<R: Rng + ?Sized>(rng: &mut R, size: usize, free: &[Name]) -> UntypedTerm {
    gen(rng, size.max(1), free, &mut Vec::new())
}

fn gen<R: Rng + ?Sized>(rng: &mut R, size: usize, free: &[Name], scope: &mut Vec<Name>) -> UntypedTerm {
    if size == 1 {
        // Bound variables are preferred so that redexes tend to duplicate or
        // erase something.
        let name = if !scope.is_empty() && (free.is_empty() || rng.gen_bool(0.8)) {
            scope[rng.gen_range(0..scope.len())].clone()
        } else if free.is_empty() {
            Name::from("y")
        } else {
            free[rng.gen_range(0..free.len())].clone()
        };
        return UntypedTerm::var(name);
    }
    if size == 2 || rng.gen_bool(0.3) {
        let x = Name::from(format!("x{}", scope.len()));
        scope.push(x.clone());
        let body = gen(rng, size - 1, free, scope);
        scope.pop();
        return UntypedTerm::lam(x, &body);
    }
    let left = rng.gen_range(1..size - 1);
    // Favor redexes over plain applications.
    let f = if left >= 2 && rng.gen_bool(0.5) {
        let x = Name::from(format!("x{}", scope.len()));
        scope.push(x.clone());
        let body = gen(rng, left - 1, free, scope);
        scope.pop();
        UntypedTerm::lam(x, &body)
    } else {
        gen(rng, left, free, scope)
    };
    let a = gen(rng, size - 1 - left, free, scope);
    UntypedTerm::app(f, a)
}

/// A corpus entry: the untyped term and its inferred refinement.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub untyped: UntypedTerm,
    pub typed: Inferred,
}

/// `count` distinct strongly normalizing terms of size at most `max_size`,
/// each with at least one β-redex, typed by [`infer_sn`]. Deterministic in
/// `seed`; gives up after `100 × count` draws.
pub fn sn_corpus(count: usize, max_size: usize, seed: u64, fuel: Fuel) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free: Vec<Name> = ["y", "z"].into_iter().map(Name::from).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count.saturating_mul(100) {
        if out.len() == count {
            break;
        }
        let size = rng.gen_range((max_size / 2).max(1)..=max_size);
        let m = random_untyped(&mut rng, size, &free);
        if m.beta_redexes().is_empty() || !seen.insert(m.clone()) || is_sn(&m, fuel) != SnVerdict::Yes {
            continue;
        }
        if let Ok(typed) = infer_sn(&m, fuel) {
            out.push(CorpusEntry { untyped: m, typed });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{erase, refines};

    #[test]
    fn sizes_and_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for size in 1..15 {
            let m = random_untyped(&mut rng, size, &[Name::from("y")]);
            assert_eq!(m.size(), size);
            assert!(m.is_locally_closed());
        }
    }

    #[test]
    fn corpus_is_deterministic_and_typed() {
        let a = sn_corpus(15, 9, 1, Fuel::nodes(500));
        let b = sn_corpus(15, 9, 1, Fuel::nodes(500));
        assert_eq!(a.len(), 15);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.untyped, y.untyped);
            assert_eq!(x.typed, y.typed);
            assert!(refines(&x.typed.term, &x.untyped));
            assert_eq!(erase(&x.typed.term).unwrap(), x.untyped);
        }
    }
}
