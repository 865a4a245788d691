//! Non-deterministic finite automata, the word relations they induce, the
//! Antimirov automaton of an expression, and the inclusion/equivalence
//! decision procedure used as ground truth for language equality.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::syntax::{self, Expr, Letter, Word};

/// Binary relation on the states of a fixed automaton.
pub type StateRelation = Relation;

/// An automaton `(Q, δ, I, F)` with states `0..n`.
///
/// `δ` is total on states × alphabet; missing transitions are empty sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    labels: Vec<String>,
    alphabet: Vec<Letter>,
    delta: Vec<Vec<Vec<usize>>>,
    initial: Vec<usize>,
    finals: Vec<bool>,
}

impl Nfa {
    pub fn new<I: IntoIterator<Item = Letter>>(labels: Vec<String>, alphabet: I) -> Nfa {
        let alphabet: Vec<Letter> = alphabet.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let n = labels.len();
        Nfa {
            delta: vec![vec![Vec::new(); alphabet.len()]; n],
            finals: vec![false; n],
            initial: Vec::new(),
            labels,
            alphabet,
        }
    }

    /// States labelled `q0 .. q{n-1}`.
    pub fn with_states<I: IntoIterator<Item = Letter>>(n: usize, alphabet: I) -> Nfa {
        Nfa::new((0..n).map(|i| format!("q{i}")).collect(), alphabet)
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q < self.labels.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "state index {q} out of range for {} states",
                self.labels.len()
            )))
        }
    }

    pub fn add_transition(&mut self, from: usize, a: Letter, to: usize) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        let k = self
            .letter_index(a)
            .ok_or_else(|| Error::Malformed(format!("letter '{a}' not in the alphabet")))?;
        let targets = &mut self.delta[from][k];
        if let Err(pos) = targets.binary_search(&to) {
            targets.insert(pos, to);
        }
        Ok(())
    }

    pub fn set_initial(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        if let Err(pos) = self.initial.binary_search(&q) {
            self.initial.insert(pos, q);
        }
        Ok(())
    }

    pub fn set_final(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        self.finals[q] = true;
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn letter_index(&self, a: Letter) -> Option<usize> {
        self.alphabet.binary_search(&a).ok()
    }

    /// `δ(q, a)`; empty for letters outside the alphabet.
    pub fn successors(&self, q: usize, a: Letter) -> &[usize] {
        match self.letter_index(a) {
            Some(k) => &self.delta[q][k],
            None => &[],
        }
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&q| self.finals[q]).collect()
    }

    /// All transitions `(from, letter, to)` in state, letter, target order.
    pub fn transitions(&self) -> Vec<(usize, Letter, usize)> {
        let mut out = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (k, targets) in row.iter().enumerate() {
                out.extend(targets.iter().map(|&t| (q, self.alphabet[k], t)));
            }
        }
        out
    }

    /// The same automaton with the given initial states; `L(A, q)` is the
    /// language of `with_initial([q])`.
    pub fn with_initial<I: IntoIterator<Item = usize>>(&self, initial: I) -> Result<Nfa> {
        let mut out = self.clone();
        out.initial.clear();
        for q in initial {
            out.set_initial(q)?;
        }
        Ok(out)
    }

    /// The same automaton read over a larger alphabet.
    pub fn extend_alphabet<I: IntoIterator<Item = Letter>>(&self, extra: I) -> Nfa {
        let alphabet: BTreeSet<Letter> = self.alphabet.iter().copied().chain(extra).collect();
        let mut out = Nfa::new(self.labels.clone(), alphabet);
        for (q, a, t) in self.transitions() {
            out.add_transition(q, a, t).expect("valid transition");
        }
        out.initial = self.initial.clone();
        out.finals = self.finals.clone();
        out
    }

    /// Graphviz rendering: finals are double circles, initial states get an
    /// entry edge without a visible source.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
        for q in 0..self.num_states() {
            let shape = if self.finals[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  q{q} [label=\"{}\", shape={shape}];",
                self.labels[q].replace('"', "\\\"")
            );
        }
        for &q in &self.initial {
            let _ = writeln!(out, "  start{q} [shape=none, label=\"\", width=0, height=0];");
            let _ = writeln!(out, "  start{q} -> q{q};");
        }
        let mut edges: Vec<((usize, usize), Vec<Letter>)> = Vec::new();
        for (q, a, t) in self.transitions() {
            match edges.iter_mut().find(|(k, _)| *k == (q, t)) {
                Some((_, ls)) => ls.push(a),
                None => edges.push(((q, t), vec![a])),
            }
        }
        for ((q, t), ls) in edges {
            let label: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", label.join(","));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> NfaJson {
        let mut delta = Vec::new();
        let mut used = BTreeSet::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (k, targets) in row.iter().enumerate() {
                if !targets.is_empty() {
                    used.insert(self.alphabet[k]);
                    delta.push(DeltaEntry {
                        from: q,
                        letter: self.alphabet[k],
                        to: targets.clone(),
                    });
                }
            }
        }
        // keep unused letters visible so the alphabet survives a round trip
        if self.num_states() > 0 {
            for &a in &self.alphabet {
                if !used.contains(&a) {
                    delta.push(DeltaEntry {
                        from: 0,
                        letter: a,
                        to: Vec::new(),
                    });
                }
            }
        }
        NfaJson {
            states: self.labels.clone(),
            delta,
            initial: self.initial.clone(),
            finals: self.finals(),
        }
    }

    pub fn from_json(json: &NfaJson) -> Result<Nfa> {
        let alphabet: BTreeSet<Letter> = json.delta.iter().map(|d| d.letter).collect();
        let mut nfa = Nfa::new(json.states.clone(), alphabet);
        for d in &json.delta {
            nfa.check_state(d.from)?;
            for &t in &d.to {
                nfa.add_transition(d.from, d.letter, t)?;
            }
        }
        for &q in &json.initial {
            nfa.set_initial(q)?;
        }
        for &q in &json.finals {
            nfa.set_final(q)?;
        }
        Ok(nfa)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub from: usize,
    pub letter: Letter,
    pub to: Vec<usize>,
}

/// Serialized form of an [`Nfa`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfaJson {
    pub states: Vec<String>,
    pub delta: Vec<DeltaEntry>,
    pub initial: Vec<usize>,
    #[serde(rename = "final")]
    pub finals: Vec<usize>,
}

/// The four-state automaton accepting `(a.b)*.a`: `q0 -a-> q1, q3`,
/// `q1 -b-> q2`, `q2 -a-> q1, q3`, initial `q0`, final `q3`.
pub fn alternating_example() -> Nfa {
    let a = Letter::new('a').unwrap();
    let b = Letter::new('b').unwrap();
    let mut nfa = Nfa::with_states(4, [a, b]);
    for (from, l, to) in [(0, a, 1), (0, a, 3), (1, b, 2), (2, a, 1), (2, a, 3)] {
        nfa.add_transition(from, l, to).unwrap();
    }
    nfa.set_initial(0).unwrap();
    nfa.set_final(3).unwrap();
    nfa
}

/// The Antimirov automaton of `e` over the letters of `e`.
pub fn antimirov_automaton(e: &Expr) -> Nfa {
    antimirov_automaton_over(e, e.letters())
}

/// The Antimirov automaton of `e` read over `alphabet` (plus the letters of
/// `e`). States are `reachset(e)` in canonical order, including members not
/// reachable from the initial states.
pub fn antimirov_automaton_over<I: IntoIterator<Item = Letter>>(e: &Expr, alphabet: I) -> Nfa {
    let states = syntax::reachset(e);
    let exprs: Vec<Expr> = states.iter().cloned().collect();
    let index: HashMap<String, usize> = exprs.iter().enumerate().map(|(i, s)| (s.to_string(), i)).collect();
    let alphabet: BTreeSet<Letter> = alphabet.into_iter().chain(e.letters()).collect();
    let mut nfa = Nfa::new(index_labels(&exprs), alphabet.iter().copied());
    for (q, state) in exprs.iter().enumerate() {
        for &a in &alphabet {
            for d in syntax::derive(state, a).iter() {
                let t = index[&d.to_string()];
                nfa.add_transition(q, a, t).expect("derivatives stay in the reach set");
            }
        }
        if syntax::nullable(state) {
            nfa.set_final(q).unwrap();
        }
    }
    for i in syntax::initials(e).iter() {
        nfa.set_initial(index[&i.to_string()]).unwrap();
    }
    nfa
}

fn index_labels(exprs: &[Expr]) -> Vec<String> {
    exprs.iter().map(|e| e.to_string()).collect()
}

/// `δ_a` as a relation on the states of `nfa`.
pub fn step_relation(nfa: &Nfa, a: Letter) -> StateRelation {
    let n = nfa.num_states();
    let mut r = Relation::empty(n);
    for q in 0..n {
        for &t in nfa.successors(q, a) {
            r.insert(q, t);
        }
    }
    r
}

/// `δ_w`, with `δ_ε = id` and `δ_{wa} = δ_w ∘ δ_a`.
pub fn word_relation(nfa: &Nfa, w: &Word) -> StateRelation {
    w.letters()
        .iter()
        .fold(Relation::identity(nfa.num_states()), |acc, &a| {
            acc.compose_unchecked(&step_relation(nfa, a))
        })
}

/// Whether `δ_w` relates some initial state to some final state.
pub fn accepts(nfa: &Nfa, w: &Word) -> bool {
    let mut current = StateSet::from_states(nfa.num_states(), nfa.initial().iter().copied());
    for &a in w.letters() {
        current = current.step(nfa, a);
        if current.is_empty() {
            return false;
        }
    }
    current.intersects_finals(nfa)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct StateSet(Vec<u64>);

impl StateSet {
    fn from_states<I: IntoIterator<Item = usize>>(n: usize, states: I) -> StateSet {
        let mut bits = vec![0u64; n.div_ceil(64)];
        for q in states {
            bits[q / 64] |= 1 << (q % 64);
        }
        StateSet(bits)
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b))
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn step(&self, nfa: &Nfa, a: Letter) -> StateSet {
        let mut next = vec![0u64; self.0.len()];
        if let Some(k) = nfa.letter_index(a) {
            for q in self.members() {
                for &t in &nfa.delta[q][k] {
                    next[t / 64] |= 1 << (t % 64);
                }
            }
        }
        StateSet(next)
    }

    fn intersects_finals(&self, nfa: &Nfa) -> bool {
        self.members().any(|q| nfa.finals[q])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    Counterexample(Word),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Holds,
    /// A shortest word in exactly one of the two languages; `side` names the
    /// language that contains it.
    Counterexample {
        word: Word,
        side: Side,
    },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Holds)
    }
}

/// Breadth-first search over pairs of subsets of the two automata, letters
/// tried in alphabet order. Returns the first (hence shortlex-least) word
/// whose pair satisfies `bad`.
fn search_pairs<F>(left: &Nfa, right: &Nfa, bad: F) -> Option<(Word, bool, bool)>
where
    F: Fn(bool, bool) -> bool,
{
    let alphabet: Vec<Letter> = left
        .alphabet()
        .iter()
        .chain(right.alphabet())
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let start = (
        StateSet::from_states(left.num_states(), left.initial().iter().copied()),
        StateSet::from_states(right.num_states(), right.initial().iter().copied()),
    );
    let mut seen: HashMap<(StateSet, StateSet), usize> = HashMap::new();
    let mut parents: Vec<Option<(usize, Letter)>> = Vec::new();
    let mut queue = VecDeque::new();

    let verdict = |pair: &(StateSet, StateSet)| (pair.0.intersects_finals(left), pair.1.intersects_finals(right));
    let rebuild = |parents: &[Option<(usize, Letter)>], mut at: usize| {
        let mut letters = Vec::new();
        while let Some((p, a)) = parents[at] {
            letters.push(a);
            at = p;
        }
        letters.reverse();
        Word::from(letters)
    };

    let (l, r) = verdict(&start);
    if bad(l, r) {
        return Some((Word::empty(), l, r));
    }
    seen.insert(start.clone(), 0);
    parents.push(None);
    queue.push_back((start, 0usize));
    while let Some((pair, id)) = queue.pop_front() {
        for &a in &alphabet {
            let next = (pair.0.step(left, a), pair.1.step(right, a));
            if seen.contains_key(&next) {
                continue;
            }
            let nid = parents.len();
            parents.push(Some((id, a)));
            let (l, r) = verdict(&next);
            if bad(l, r) {
                return Some((rebuild(&parents, nid), l, r));
            }
            seen.insert(next.clone(), nid);
            queue.push_back((next, nid));
        }
    }
    None
}

/// Decides `L(left) ⊆ L(right)`; on failure returns the shortlex-least word
/// of `L(left) \ L(right)`.
pub fn language_subset(left: &Nfa, right: &Nfa) -> Inclusion {
    match search_pairs(left, right, |l, r| l && !r) {
        None => Inclusion::Holds,
        Some((w, _, _)) => Inclusion::Counterexample(w),
    }
}

/// Decides `L(left) = L(right)`; on failure returns the shortlex-least word
/// in the symmetric difference.
pub fn language_equiv(left: &Nfa, right: &Nfa) -> Equivalence {
    match search_pairs(left, right, |l, r| l != r) {
        None => Equivalence::Holds,
        Some((word, l, _)) => Equivalence::Counterexample {
            word,
            side: if l { Side::Left } else { Side::Right },
        },
    }
}

/// `ℓ(e) ⊆ ℓ(f)`, decided on the Antimirov automata.
pub fn expr_subset(e: &Expr, f: &Expr) -> Inclusion {
    language_subset(&antimirov_automaton(e), &antimirov_automaton(f))
}

/// `ℓ(e) = ℓ(f)`, decided on the Antimirov automata.
pub fn expr_equiv(e: &Expr, f: &Expr) -> Equivalence {
    language_equiv(&antimirov_automaton(e), &antimirov_automaton(f))
}
