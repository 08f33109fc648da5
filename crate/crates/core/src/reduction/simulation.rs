//! Relating β-steps on untyped terms to i-steps on their refinements.

use std::collections::{HashMap, VecDeque};

use crate::syntax::{Position, SetTerm, Term, TermKind, UntypedTerm};
use crate::typing::{erase, refines};

use super::{contract, reducts, step_at, Calculus, ReductionError, Step, StepKind};

/// The outcome of simulating one β-step.
#[derive(Clone, Debug)]
pub struct Simulation {
    /// The β-contractum of the untyped term.
    pub untyped: UntypedTerm,
    /// The annotated term after contracting every copy of the redex.
    pub term: Term,
    pub steps: Vec<Step>,
}

/// Every position of `t` that an untyped position refers to: set elements
/// fan out, so one untyped position may have several copies.
pub(crate) fn copies(t: &Term, upath: &[usize]) -> Vec<Position> {
    let mut out = Vec::new();
    collect_copies(t, upath, &mut Vec::new(), &mut out);
    out
}

fn collect_copies(t: &Term, upath: &[usize], path: &mut Vec<usize>, out: &mut Vec<Position>) {
    let Some((&i, rest)) = upath.split_first() else {
        out.push(Position::new(path.clone()));
        return;
    };
    match (t.kind(), i) {
        (TermKind::Lam(_, _, body), 0) | (TermKind::App(body, _), 0) => {
            path.push(0);
            collect_copies(body, rest, path, out);
            path.pop();
        }
        (TermKind::App(_, s), 1) => {
            for (k, e) in s.iter().enumerate() {
                path.push(1 + k);
                collect_copies(e, rest, path, out);
                path.pop();
            }
        }
        _ => {}
    }
}

/// Drops set indices: argument element `1 + i` of a term position is the
/// argument `1` of the untyped position.
pub fn erase_position(t: &Term, pos: &Position) -> Option<Position> {
    let mut out = Vec::with_capacity(pos.path().len());
    let mut cur = t;
    for &i in pos.path() {
        match cur.kind() {
            TermKind::Lam(..) if i == 0 => out.push(0),
            TermKind::App(..) if i == 0 => out.push(0),
            TermKind::App(..) if i >= 1 => out.push(1),
            _ => return None,
        }
        cur = cur.child(i)?;
    }
    Some(Position::new(out))
}

/// Contracts the first `k` copies (in the order of the original term) in one
/// pass, and reports where copy number `track` ended up.
struct CopyWalker<'a> {
    upath: &'a [usize],
    counter: usize,
    k: usize,
    track: usize,
}

impl CopyWalker<'_> {
    fn walk(&mut self, t: &Term, depth: usize) -> Result<(Term, Option<Vec<usize>>), ReductionError> {
        if depth == self.upath.len() {
            let idx = self.counter;
            self.counter += 1;
            if idx < self.k {
                return Ok((contract(t, Calculus::I, &Position::root())?, None));
            }
            return Ok((t.clone(), (idx == self.track).then(Vec::new)));
        }
        let i = self.upath[depth];
        Ok(match (t.kind(), i) {
            (TermKind::Lam(h, b, body), 0) => {
                let (nb, p) = self.walk(body, depth + 1)?;
                (Term::lam(h.name().clone(), b.clone(), nb), p.map(|p| prefixed(0, p)))
            }
            (TermKind::App(f, s), 0) => {
                let (nf, p) = self.walk(f, depth + 1)?;
                (Term::app(nf, s.clone()), p.map(|p| prefixed(0, p)))
            }
            (TermKind::App(f, s), 1) => {
                let mut elems = Vec::with_capacity(s.len());
                let mut found = None;
                for e in s.iter() {
                    let (ne, p) = self.walk(e, depth + 1)?;
                    if let Some(p) = p {
                        found = Some((ne.clone(), p));
                    }
                    elems.push(ne);
                }
                let set = SetTerm::new(elems);
                let pos = found.map(|(ne, p)| {
                    let idx = set.elements().binary_search(&ne).expect("element survives canonicalization");
                    prefixed(1 + idx, p)
                });
                (Term::app(f.clone(), set), pos)
            }
            _ => return Err(ReductionError::Precondition("position does not resolve in the annotated term".into())),
        })
    }
}

fn prefixed(i: usize, mut p: Vec<usize>) -> Vec<usize> {
    p.insert(0, i);
    p
}

fn contract_copies(t: &Term, upath: &[usize], k: usize, track: usize) -> Result<(Term, Option<Position>), ReductionError> {
    let mut w = CopyWalker { upath, counter: 0, k, track };
    let (r, p) = w.walk(t, 0)?;
    Ok((r, p.map(Position::new)))
}

/// Simulates the β-step of `m` at `beta` by contracting, one at a time, every
/// copy of that redex in the refinement `t`.
pub fn simulate_beta(t: &Term, m: &UntypedTerm, beta: &Position) -> Result<Simulation, ReductionError> {
    if !t.is_wrapper_free() || !refines(t, m) {
        return Err(ReductionError::Precondition("the annotated term does not refine the untyped term".into()));
    }
    if t.ty().is_none() {
        return Err(ReductionError::Precondition("the annotated term is not typable".into()));
    }
    let redex = m.subterm(beta).filter(|r| r.is_beta_redex());
    if redex.is_none() {
        return Err(ReductionError::Precondition(format!("no β-redex at {beta}")));
    }
    let n = m.beta_step(beta).expect("checked redex");
    let upath = beta.path();
    let count = copies(t, upath).len();
    let mut steps = Vec::with_capacity(count);
    let mut current = t.clone();
    for k in 1..=count {
        let (_, pos) = contract_copies(t, upath, k - 1, k - 1)?;
        let pos = pos.expect("tracked copy exists");
        let (next, _) = step_at(&current, &pos, Calculus::I)?;
        let (expected, _) = contract_copies(t, upath, k, usize::MAX)?;
        if next != expected {
            return Err(ReductionError::Internal("copy-by-copy contraction diverged".into()));
        }
        steps.push(Step { kind: StepKind::I, position: pos, source: current, target: next.clone() });
        current = next;
    }
    if !refines(&current, &n) {
        return Err(ReductionError::Internal("simulated term does not refine the β-contractum".into()));
    }
    Ok(Simulation { untyped: n, term: current, steps })
}

/// Default node-expansion budget for [`project_step`]: the squared product of
/// the number of redex copies and the term size, with a floor.
pub fn default_project_budget(t: &Term, position: &Position) -> usize {
    let copies = erase_position(t, position).map(|p| copies(t, p.path()).len()).unwrap_or(1).max(1);
    let n = copies * t.size();
    (n * n).max(1_000)
}

/// Given the i-step `t → s` at `position` on a uniform `t`, finds the
/// β-contractum `N` of `erase(t)` and a reduct `s'` of `s` refining `N`.
pub fn project_step(t: &Term, s: &Term, position: &Position) -> Result<Simulation, ReductionError> {
    project_step_with_budget(t, s, position, default_project_budget(t, position))
}

pub fn project_step_with_budget(
    t: &Term,
    s: &Term,
    position: &Position,
    budget: usize,
) -> Result<Simulation, ReductionError> {
    let m = erase(t)?;
    let (stepped, _) = step_at(t, position, Calculus::I)?;
    if stepped != *s {
        return Err(ReductionError::Precondition(format!("the second term is not the i-step of the first at {position}")));
    }
    let epos = erase_position(t, position).expect("resolved by the step");
    let n = m.beta_step(&epos).ok_or_else(|| ReductionError::Internal("erased position is not a β-redex".into()))?;
    let steps = search_refinement(s, &n, budget)?;
    let term = steps.last().map(|st| st.target.clone()).unwrap_or_else(|| s.clone());
    Ok(Simulation { untyped: n, term, steps })
}

/// Breadth-first search over `→i` for a term refining `n`. The first hit in
/// breadth-first order, with reducts generated by position, is returned.
fn search_refinement(s: &Term, n: &UntypedTerm, budget: usize) -> Result<Vec<Step>, ReductionError> {
    if refines(s, n) {
        return Ok(Vec::new());
    }
    let mut parent: HashMap<Term, Option<(Term, Position)>> = HashMap::new();
    parent.insert(s.clone(), None);
    let mut queue = VecDeque::from([s.clone()]);
    let mut expansions = 0;
    while let Some(cur) = queue.pop_front() {
        if expansions >= budget {
            break;
        }
        expansions += 1;
        for (pos, next) in reducts(&cur, Calculus::I) {
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((cur.clone(), pos)));
            if refines(&next, n) {
                return Ok(unwind(&parent, next));
            }
            queue.push_back(next);
        }
    }
    Err(ReductionError::SearchBudgetExceeded { budget })
}

fn unwind(parent: &HashMap<Term, Option<(Term, Position)>>, goal: Term) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut cur = goal;
    while let Some(Some((prev, pos))) = parent.get(&cur) {
        steps.push(Step { kind: StepKind::I, position: pos.clone(), source: prev.clone(), target: cur.clone() });
        cur = prev.clone();
    }
    steps.reverse();
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::step_i;
    use crate::syntax::{parse_annotated, parse_untyped};

    /// `I^A = λx^{a→a}.x`, `I^a = λx^{a}.x`, `A = a → a`.
    pub(crate) fn example_term() -> Term {
        let ia = r"(\z:{a}. z^a)";
        let iaa = r"(\z:{a -> a}. z^(a -> a))";
        let iaaa = r"(\z:{(a -> a) -> a -> a}. z^((a -> a) -> a -> a))";
        parse_annotated(&format!(
            r"(\x:{{(a -> a) -> a -> a, a -> a}}. x^((a -> a) -> a -> a) x^(a -> a)) {{{iaaa} {iaa}, {iaa} {ia}}}"
        ))
        .unwrap()
    }

    #[test]
    fn simulate_single_copy() {
        let t = parse_annotated(r"(\x:{a}.x^a){y^a}").unwrap();
        let m = parse_untyped(r"(\x. x) y").unwrap();
        let sim = simulate_beta(&t, &m, &Position::root()).unwrap();
        assert_eq!(sim.term, parse_annotated("y^a").unwrap());
        assert_eq!(sim.steps.len(), 1);
    }

    #[test]
    fn simulate_argument_redex_with_two_copies() {
        let t = example_term();
        let m = erase(&t).unwrap();
        assert_eq!(m, parse_untyped(r"(\x. x x) ((\z. z) (\z. z))").unwrap());
        let sim = simulate_beta(&t, &m, &Position::new(vec![1])).unwrap();
        assert_eq!(sim.steps.len(), 2);
        assert_eq!(sim.untyped, parse_untyped(r"(\x. x x) (\z. z)").unwrap());
        assert!(refines(&sim.term, &sim.untyped));
        // The intermediate term is not uniform.
        assert!(erase(&sim.steps[0].target).is_err());
    }

    #[test]
    fn simulate_head_redex() {
        let t = example_term();
        let m = erase(&t).unwrap();
        let sim = simulate_beta(&t, &m, &Position::root()).unwrap();
        assert_eq!(sim.steps.len(), 1);
        assert_eq!(sim.untyped, parse_untyped(r"(\z. z) (\z. z) ((\z. z) (\z. z))").unwrap());
    }

    #[test]
    fn project_completes_the_second_copy() {
        let t = example_term();
        let first = crate::reduction::redexes(&t)
            .into_iter()
            .find(|r| r.position.path().len() == 1)
            .unwrap()
            .position;
        let s = step_i(&t, &first).unwrap();
        let sim = project_step(&t, &s, &first).unwrap();
        assert_eq!(sim.steps.len(), 1);
        assert!(refines(&sim.term, &sim.untyped));
        assert!(matches!(
            project_step_with_budget(&t, &s, &first, 0),
            Err(ReductionError::SearchBudgetExceeded { budget: 0 })
        ));
    }

    #[test]
    fn project_uniform_step_needs_nothing() {
        let t = parse_annotated(r"(\x:{a}.x^a){y^a}").unwrap();
        let s = step_i(&t, &Position::root()).unwrap();
        let sim = project_step_with_budget(&t, &s, &Position::root(), 0).unwrap();
        assert!(sim.steps.is_empty());
        assert_eq!(sim.term, s);
    }
}
