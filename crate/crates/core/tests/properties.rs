//! Property tests over typed refinements of random strongly normalizing terms.

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use proptest::sample::subsequence;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use isect::measure::{max_degree, measure_report, simp, simp_full, w_measure};
use isect::oracle::{explore, infer_sn, is_sn, normal_form, random_untyped, Fuel, SnVerdict};
use isect::reduction::{
    complete_development, corresponding_step, forgetful_reducts, par_reduces, redexes, redexes_in, reducts, step_i,
    Calculus,
};
use isect::syntax::{
    parse_annotated, parse_type, parse_untyped, Name, Position, SetTerm, Term, TermKind, Type, UntypedTerm,
};
use isect::typing::{
    check, erase_derivation, minimal_context, synthesize_type, CurryDerivation, TypingContext,
};

fn fuel() -> Fuel {
    Fuel::nodes(2_000)
}

fn untyped() -> impl Strategy<Value = UntypedTerm> {
    (any::<u64>(), 1usize..=12).prop_map(|(seed, size)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_untyped(&mut rng, size, &[Name::from("y"), Name::from("z")])
    })
}

/// A typed, wrapper-free refinement of a random SN term.
fn typed() -> impl Strategy<Value = Term> {
    untyped().prop_filter_map("not SN within fuel", |m| {
        (is_sn(&m, fuel()) == SnVerdict::Yes).then(|| infer_sn(&m, fuel()).ok()).flatten().map(|r| r.term)
    })
}

/// A typed term that may contain wrappers: a point on the im normalization path.
fn memory_term() -> impl Strategy<Value = Term> {
    (typed(), 0usize..4).prop_map(|(t, k)| {
        let mut cur = t;
        for _ in 0..k {
            let Some((_, next)) = reducts(&cur, Calculus::Im).into_iter().next() else { break };
            cur = next;
        }
        cur
    })
}

/// Terms reachable by `▷` from `from`, up to `limit` nodes.
fn forget_reachable(from: &Term, to: &Term, limit: usize) -> bool {
    let mut seen = BTreeSet::from([from.clone()]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(t) = queue.pop_front() {
        for (_, s) in forgetful_reducts(&t) {
            if s == *to {
                return true;
            }
            if seen.len() < limit && seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn annotated_print_parse_round_trip(t in memory_term()) {
        let printed = t.to_string();
        prop_assert_eq!(parse_annotated(&printed).unwrap(), t);
    }

    #[test]
    fn untyped_print_parse_round_trip(m in untyped()) {
        prop_assert_eq!(parse_untyped(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn type_print_parse_round_trip(t in typed()) {
        let a: Type = synthesize_type(&t).unwrap();
        prop_assert_eq!(parse_type(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn set_terms_are_canonical(t in memory_term(), order in Just(()).prop_perturb(|_, mut r| r.next_u64())) {
        let elems: Vec<Term> = std::iter::once(t.clone()).chain(reducts(&t, Calculus::Im).into_iter().map(|(_, s)| s)).collect();
        let s = SetTerm::new(elems.clone());
        prop_assert!(s.is_canonical());
        prop_assert_eq!(SetTerm::new(s.elements().to_vec()), s.clone());
        let mut shuffled = elems;
        let n = shuffled.len();
        shuffled.rotate_left((order as usize) % n.max(1));
        shuffled.extend(s.elements().iter().cloned());
        prop_assert_eq!(SetTerm::new(shuffled), s);
    }

    #[test]
    fn weakening_preserves_typing(t in typed()) {
        let ctx = minimal_context(&t).unwrap();
        let a = check(&ctx, &t).unwrap();
        let wider = ctx.union(&TypingContext::from_iter([(Name::from("unused"), Type::base("q"))]));
        prop_assert_eq!(check(&wider, &t).unwrap(), a);
        for x in ctx.domain() {
            prop_assert!(check(&ctx.without(x), &t).is_err());
        }
    }

    #[test]
    fn subject_reduction(t in memory_term()) {
        let a = synthesize_type(&t).unwrap();
        let ctx = minimal_context(&t).unwrap();
        for calculus in [Calculus::I, Calculus::Im] {
            if calculus == Calculus::I && !t.is_wrapper_free() {
                continue;
            }
            for (p, s) in reducts(&t, calculus) {
                prop_assert_eq!(synthesize_type(&s).unwrap(), a.clone(), "step at {}", p);
                prop_assert!(s.is_well_formed());
                prop_assert!(check(&ctx, &s).is_ok());
            }
        }
    }

    #[test]
    fn forgetting_drops_one_wrapper_and_its_payload(t in memory_term()) {
        let a = synthesize_type(&t).unwrap();
        for (p, s) in forgetful_reducts(&t) {
            let TermKind::Wrap(_, payload) = t.subterm(&p).unwrap().kind() else { panic!("not a wrapper at {p}") };
            prop_assert_eq!(s.weight() + 1 + payload.weight(), t.weight());
            prop_assert_eq!(synthesize_type(&s).unwrap(), a.clone());
        }
    }

    #[test]
    fn corresponding_step_forgets_to_the_i_step(t in typed()) {
        for r in redexes_in(&t, Calculus::I) {
            let s = step_i(&t, &r.position).unwrap();
            let s2 = corresponding_step(&t, &r.position).unwrap();
            prop_assert_eq!(s2.weight(), 1);
            prop_assert!(forgetful_reducts(&s2).into_iter().any(|(_, u)| u == s));
        }
    }

    #[test]
    fn measure_decreases_along_i_steps(t in typed()) {
        let w = w_measure(&t).unwrap();
        for r in redexes_in(&t, Calculus::I) {
            prop_assert!(w_measure(&step_i(&t, &r.position).unwrap()).unwrap() < w);
        }
        let g = explore(&t, Calculus::I, Fuel::nodes(5_000));
        if !g.truncated {
            prop_assert!(g.longest_path().unwrap() <= w);
        }
    }

    #[test]
    fn full_simplification_is_stable_under_im_and_forget(t in memory_term()) {
        let full = simp_full(&t).unwrap();
        for (_, s) in reducts(&t, Calculus::Im) {
            prop_assert_eq!(simp_full(&s).unwrap(), full.clone());
        }
        for (_, s) in forgetful_reducts(&t) {
            let fs = simp_full(&s).unwrap();
            prop_assert!(fs.weight() < full.weight());
            prop_assert!(forget_reachable(&full, &fs, 5_000), "{} does not forget to {}", full, fs);
        }
    }

    #[test]
    fn simplification_is_sound_and_lowers_degree(t in memory_term()) {
        let (nf, _) = normal_form(&t, Calculus::Im, Fuel::nodes(100_000)).unwrap();
        let top = max_degree(&t).unwrap();
        let graph = explore(&t, Calculus::Im, Fuel::nodes(5_000));
        for d in 1..=top + 1 {
            let s = simp(&t, d).unwrap();
            prop_assert_eq!(normal_form(&s, Calculus::Im, Fuel::nodes(100_000)).unwrap().0, nf.clone());
            if !graph.truncated {
                prop_assert!(graph.node_id(&s).is_some(), "simp_{} not reachable", d);
            }
            if top <= d {
                prop_assert!(max_degree(&s).unwrap() < d);
            }
            // Simplification does not create abstractions.
            let height = synthesize_type(&t).unwrap().height();
            if t.as_w_abstraction().is_none() && top <= d && height >= d {
                prop_assert!(s.as_w_abstraction().is_none());
            }
        }
    }

    #[test]
    fn report_stages_lower_the_degree(t in typed()) {
        let r = measure_report(&t).unwrap();
        prop_assert_eq!(r.w, w_measure(&t).unwrap());
        for st in &r.stages {
            prop_assert!(st.max_degree < st.after_degree);
        }
        prop_assert!(redexes(&r.normal_form).is_empty());
    }

    #[test]
    fn parallel_reduction_contains_steps_and_development(t in memory_term()) {
        let comp = complete_development(&t, Calculus::Im).unwrap();
        prop_assert!(par_reduces(&t, &comp, Calculus::Im));
        for (_, s) in reducts(&t, Calculus::Im) {
            prop_assert!(par_reduces(&t, &s, Calculus::Im));
            prop_assert!(par_reduces(&s, &comp, Calculus::Im), "{} does not reach comp", s);
        }
    }

    #[test]
    fn derivation_json_round_trip(t in typed()) {
        let ctx = minimal_context(&t).unwrap();
        let d = erase_derivation(&ctx, &t).unwrap();
        prop_assert_eq!(CurryDerivation::from_json(&d.to_json()).unwrap(), d);
        prop_assert_eq!(TypingContext::from_json(&ctx.to_json()).unwrap(), ctx);
    }

    #[test]
    fn positions_round_trip(path in proptest::collection::vec(0usize..6, 0..6)) {
        let p = Position::new(path);
        prop_assert_eq!(p.to_string().parse::<Position>().unwrap(), p);
    }

    #[test]
    fn sub_developments_are_parallel(t in typed(), keep in subsequence((0..8).collect::<Vec<usize>>(), 0..8)) {
        let mut k = 0;
        let partial = isect::reduction::develop(&t, Calculus::I, &mut |_| { k += 1; keep.contains(&(k - 1)) }).unwrap();
        prop_assert!(par_reduces(&t, &partial, Calculus::I));
        prop_assert!(par_reduces(&partial, &complete_development(&t, Calculus::I).unwrap(), Calculus::I));
    }
}
