//! Transition monoids and transformation automata.
//!
//! The transformation automaton `A[R]` runs on relations over the states of
//! `A`: it starts in `id`, reading `a` moves from `R'` to `R' ∘ δ_a`, and it
//! accepts in `R`. Its language is `{ w : δ_w = R }`.
//!
//! Only the part reachable from `id` is materialized, which is exactly the
//! transition monoid `{ δ_w : w ∈ Σ* }`. Every element keeps the
//! shortlex-least word `w` with `δ_w` equal to it.

use std::collections::{HashMap, VecDeque};

use crate::automata::{step_relation, Nfa, StateRelation};
use crate::error::{Error, Result};
use crate::syntax::{Letter, Word};

pub const DEFAULT_MONOID_BUDGET: usize = 4096;

#[derive(Clone, Debug)]
pub struct TransitionMonoid {
    base: usize,
    alphabet: Vec<Letter>,
    elements: Vec<StateRelation>,
    witnesses: Vec<Word>,
    index: HashMap<StateRelation, usize>,
    /// `steps[m][k]` is the element `m ∘ δ_{alphabet[k]}`.
    steps: Vec<Vec<usize>>,
    generators: Vec<StateRelation>,
}

impl TransitionMonoid {
    /// Number of elements.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Size of the state set the relations live on.
    pub fn base(&self) -> usize {
        self.base
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn elements(&self) -> &[StateRelation] {
        &self.elements
    }

    pub fn element(&self, m: usize) -> &StateRelation {
        &self.elements[m]
    }

    pub fn witness(&self, m: usize) -> &Word {
        &self.witnesses[m]
    }

    pub fn index_of(&self, r: &StateRelation) -> Option<usize> {
        self.index.get(r).copied()
    }

    /// Index of the identity relation; always 0.
    pub fn identity(&self) -> usize {
        0
    }

    pub fn generator(&self, a: Letter) -> Option<&StateRelation> {
        self.alphabet.binary_search(&a).ok().map(|k| &self.generators[k])
    }

    /// Index of `δ_a`; letters outside the alphabet act as the empty
    /// relation, which need not be an element.
    pub fn generator_index(&self, a: Letter) -> Option<usize> {
        let k = self.alphabet.binary_search(&a).ok()?;
        Some(self.steps[0][k])
    }

    /// `m ∘ δ_a`.
    pub fn step(&self, m: usize, a: Letter) -> Option<usize> {
        let k = self.alphabet.binary_search(&a).ok()?;
        Some(self.steps[m][k])
    }

    /// `m ∘ n`, computed by reading the witness of `n` from `m`.
    pub fn multiply(&self, m: usize, n: usize) -> usize {
        self.witnesses[n].letters().iter().fold(m, |acc, &a| {
            self.step(acc, a).expect("witness letters belong to the alphabet")
        })
    }

    /// The element `δ_w`.
    pub fn of_word(&self, w: &Word) -> Option<usize> {
        w.letters()
            .iter()
            .try_fold(self.identity(), |acc, &a| self.step(acc, a))
    }
}

/// Closure of `{id}` under right composition with each `δ_a`, in
/// breadth-first order.
pub fn transition_monoid(nfa: &Nfa) -> Result<TransitionMonoid> {
    transition_monoid_with_budget(nfa, DEFAULT_MONOID_BUDGET)
}

pub fn transition_monoid_with_budget(nfa: &Nfa, budget: usize) -> Result<TransitionMonoid> {
    let n = nfa.num_states();
    let alphabet = nfa.alphabet().to_vec();
    let generators: Vec<StateRelation> = alphabet.iter().map(|&a| step_relation(nfa, a)).collect();
    let id = StateRelation::identity(n);
    let mut elements = vec![id.clone()];
    let mut witnesses = vec![Word::empty()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut steps: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(m) = queue.pop_front() {
        let mut row = Vec::with_capacity(alphabet.len());
        for (k, g) in generators.iter().enumerate() {
            let next = elements[m].compose_unchecked(g);
            let idx = match index.get(&next) {
                Some(&i) => i,
                None => {
                    let i = elements.len();
                    if i >= budget {
                        return Err(Error::Budget {
                            what: "transition monoid",
                            limit: budget,
                            needed: i + 1,
                        });
                    }
                    let mut w = witnesses[m].clone();
                    w.push(alphabet[k]);
                    elements.push(next.clone());
                    witnesses.push(w);
                    index.insert(next, i);
                    queue.push_back(i);
                    i
                }
            };
            row.push(idx);
        }
        steps.push(row);
    }
    Ok(TransitionMonoid {
        base: n,
        alphabet,
        elements,
        witnesses,
        index,
        steps,
        generators,
    })
}

/// Relational composition.
pub fn compose(r1: &StateRelation, r2: &StateRelation) -> Result<StateRelation> {
    r1.compose(r2)
}

/// `A[R]` restricted to the transition monoid, plus `R` itself when it is
/// not reachable (in which case the language is empty). State `i < |M|` is
/// monoid element `i`; state labels print the relations.
pub fn transformation_automaton_in(monoid: &TransitionMonoid, target: &StateRelation) -> Result<Nfa> {
    if target.base() != monoid.base() {
        return Err(Error::MismatchedBase {
            left: monoid.base(),
            right: target.base(),
        });
    }
    let mut labels: Vec<String> = monoid.elements.iter().map(|r| r.to_string()).collect();
    let target_state = match monoid.index_of(target) {
        Some(i) => i,
        None => {
            labels.push(target.to_string());
            labels.len() - 1
        }
    };
    let mut nfa = Nfa::new(labels, monoid.alphabet.iter().copied());
    for m in 0..monoid.len() {
        for (k, &a) in monoid.alphabet.iter().enumerate() {
            nfa.add_transition(m, a, monoid.steps[m][k])?;
        }
    }
    if target_state == monoid.len() {
        for (k, &a) in monoid.alphabet.iter().enumerate() {
            let next = target.compose_unchecked(&monoid.generators[k]);
            if let Some(t) = monoid.index_of(&next) {
                nfa.add_transition(target_state, a, t)?;
            }
        }
    }
    nfa.set_initial(monoid.identity())?;
    nfa.set_final(target_state)?;
    Ok(nfa)
}

/// `A[R]` for an automaton; see [`transformation_automaton_in`].
pub fn transformation_automaton(nfa: &Nfa, target: &StateRelation) -> Result<Nfa> {
    transformation_automaton_in(&transition_monoid(nfa)?, target)
}
