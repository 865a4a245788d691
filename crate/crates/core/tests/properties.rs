use std::collections::BTreeSet;

use proptest::prelude::*;

use kleene::automata::{
    accepts, antimirov_automaton, expr_equiv, expr_subset, word_relation, Equivalence, Inclusion, Side,
};
use kleene::models::{
    canonical_model_over, check_axioms, countermodel_search, interpret, language_image, word_interpretation_over,
    CountermodelVerdict, FiniteKa,
};
use kleene::relation::Relation;
use kleene::sample::rewrite;
use kleene::solver::{soli, SolveOptions};
use kleene::syntax::{derive, enumerate, initials, member, nullable, parse, reachset, Expr, Letter, Word};
use kleene::transform::transition_monoid_with_budget;

fn ab() -> Vec<Letter> {
    vec![Letter::new('a').unwrap(), Letter::new('b').unwrap()]
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just('a'), Just('b')].prop_map(|c| Letter::new(c).unwrap())
}

fn expr(depth: u32) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        1 => Just(Expr::zero()),
        1 => Just(Expr::one()),
        4 => letter().prop_map(Expr::atom),
    ];
    leaf.prop_recursive(depth, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::plus(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::times(l, r)),
            inner.prop_map(Expr::star),
        ]
    })
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(letter(), 0..=max).prop_map(Word::from)
}

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::vec((0..n, 0..n), 0..=n * 2).prop_map(move |p| Relation::from_pairs(n, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_round_trips(e in expr(4)) {
        let printed = e.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), e);
    }

    #[test]
    fn derivatives_stay_in_reach_set(e in expr(4), a in letter()) {
        let rho = reachset(&e);
        prop_assert!(initials(&e).is_subset(&rho));
        for x in rho.iter() {
            prop_assert!(derive(x, a).is_subset(&rho), "{} by {}", x, a);
        }
    }

    #[test]
    fn membership_agrees_with_enumeration(e in expr(4), w in word(5)) {
        let lang = enumerate(&e, 5).unwrap();
        prop_assert_eq!(member(&w, &e), lang.contains(&w));
        prop_assert_eq!(nullable(&e), lang.contains(&Word::empty()));
    }

    #[test]
    fn automaton_accepts_the_language(e in expr(4), w in word(5)) {
        prop_assert_eq!(accepts(&antimirov_automaton(&e), &w), member(&w, &e));
    }

    #[test]
    fn word_relations_compose(e in expr(4), u in word(4), v in word(4)) {
        let nfa = antimirov_automaton(&e);
        let whole = word_relation(&nfa, &u.concat(&v));
        prop_assert_eq!(word_relation(&nfa, &u).compose(&word_relation(&nfa, &v)).unwrap(), whole);
    }

    #[test]
    fn inclusion_agrees_with_enumeration(e in expr(3), f in expr(3)) {
        let le = enumerate(&e, 4).unwrap();
        let lf = enumerate(&f, 4).unwrap();
        match expr_subset(&e, &f) {
            Inclusion::Holds => prop_assert!(le.is_subset(&lf)),
            Inclusion::Counterexample(w) => {
                prop_assert!(member(&w, &e) && !member(&w, &f));
                let shorter = le.difference(&lf).filter(|x| x.len() < w.len()).count();
                prop_assert_eq!(shorter, 0);
            }
        }
    }

    #[test]
    fn equivalence_reports_a_separating_word(e in expr(3), f in expr(3)) {
        if let Equivalence::Counterexample { word, side } = expr_equiv(&e, &f) {
            let (inside, outside) = match side {
                Side::Left => (&e, &f),
                Side::Right => (&f, &e),
            };
            prop_assert!(member(&word, inside) && !member(&word, outside));
        }
    }

    #[test]
    fn solving_recovers_the_language(e in expr(3)) {
        let nfa = antimirov_automaton(&e);
        prop_assert!(expr_equiv(&soli(&nfa, SolveOptions::simplifying()), &e).holds());
        // Without simplification the solution grows exponentially in the
        // number of states.
        if nfa.num_states() <= 4 {
            prop_assert!(expr_equiv(&soli(&nfa, SolveOptions::default()), &e).holds());
        }
    }

    #[test]
    fn rewrites_are_equivalent(e in expr(4), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = rewrite(&mut rng, &e, 3, &ab());
        prop_assert!(expr_equiv(&e, &f).holds(), "{} vs {}", e, f);
    }

    #[test]
    fn relation_composition_is_associative(r in relation(4), s in relation(4), t in relation(4)) {
        let left = r.compose(&s).unwrap().compose(&t).unwrap();
        let right = r.compose(&s.compose(&t).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn star_is_the_reflexive_transitive_closure(r in relation(4)) {
        let s = r.star();
        prop_assert!(Relation::identity(4).is_subset(&s));
        prop_assert!(r.is_subset(&s));
        prop_assert_eq!(s.compose(&s).unwrap(), s.clone());
        prop_assert_eq!(s.star(), s);
    }

    #[test]
    fn monoid_products_match_words(e in expr(3), u in word(4), v in word(4)) {
        let nfa = antimirov_automaton(&e).extend_alphabet(ab());
        let Ok(m) = transition_monoid_with_budget(&nfa, 256) else { return Ok(()) };
        let (x, y) = (m.of_word(&u).unwrap(), m.of_word(&v).unwrap());
        prop_assert_eq!(m.element(m.multiply(x, y)), &word_relation(&nfa, &u.concat(&v)));
        for k in 0..m.len() {
            prop_assert_eq!(&word_relation(&nfa, m.witness(k)), m.element(k));
        }
    }

    #[test]
    fn canonical_interpretation_is_the_language_image(e in expr(3), g in expr(3)) {
        let letters: BTreeSet<Letter> = ab().into_iter().collect();
        let Ok(h) = canonical_model_over(&e, letters.clone(), 256) else { return Ok(()) };
        let direct: BTreeSet<usize> = h.ka.members(&interpret(&h, &g).unwrap()).into_iter().collect();
        let nfa = kleene::automata::antimirov_automaton_over(&g, letters);
        prop_assert_eq!(direct, language_image(h.ka.monoid(), &nfa).unwrap());
    }

    #[test]
    fn word_models_read_off_infixes(e in expr(4), w in word(5)) {
        let h = word_interpretation_over(&w, ab());
        let r = interpret(&h, &e).unwrap();
        for i in 0..=w.len() {
            for j in 0..=w.len() {
                prop_assert_eq!(r.contains(i, j), i <= j && member(&w.slice(i, j), &e), "({}, {})", i, j);
            }
        }
    }

    #[test]
    fn countermodels_separate(e in expr(3), f in expr(3)) {
        match countermodel_search(&e, &f).unwrap() {
            CountermodelVerdict::Equivalent => prop_assert!(expr_equiv(&e, &f).holds()),
            CountermodelVerdict::Witness(m) => {
                prop_assert!(m.validate(&e, &f).unwrap());
                prop_assert!(member(&m.word, &e) != member(&m.word, &f));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_subalgebras_satisfy_the_axioms(e in expr(3), seed in any::<u64>()) {
        let letters: BTreeSet<Letter> = e.letters();
        let Ok(h) = canonical_model_over(&e, letters, 64) else { return Ok(()) };
        let gens: Vec<_> = h.assignment.values().cloned().collect();
        let Ok((k, _)) = FiniteKa::generated(&h.ka, &gens, 128) else { return Ok(()) };
        let report = check_axioms(&k, seed);
        prop_assert!(report.passed(), "{:?}", report.violations.first().map(|v| v.law));
    }
}
