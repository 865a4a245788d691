//! Finite Kleene algebras and interpretations of expressions in them.
//!
//! Three families are provided:
//!
//! * [`PowersetKa`]: subsets of a transition monoid under union, pointwise
//!   product and iterated closure. With `h(a) = {δ_a}` over the monoid of
//!   `Aₑ` this is the canonical model `𝒦ₑ`.
//! * [`RelationalKa`]: relations on `{0, .., n}` under union, composition
//!   and reflexive-transitive closure. `Kₙ` with the positional assignment
//!   `h_w` is the word model used for countermodels.
//! * [`FiniteKa`]: an explicit carrier with operation tables, obtained by
//!   tabulating a closed subset of either of the above.
//!
//! Powerset and relational carriers are exponential, so their elements are
//! computed on demand; only [`FiniteKa`] stores full tables.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{antimirov_automaton_over, expr_equiv, Equivalence, Nfa, Side};
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::syntax::{Expr, ExprKind, Letter, Word};
use crate::transform::{transition_monoid_with_budget, TransitionMonoid, DEFAULT_MONOID_BUDGET};

pub trait KleeneAlgebra {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn plus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn times(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn star(&self, x: &Self::Elem) -> Self::Elem;
    fn show(&self, x: &Self::Elem) -> String;

    /// The natural order: `x ≤ y` iff `x + y = y`.
    fn leq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        &self.plus(x, y) == y
    }
}

/// A set of monoid elements, indexed as in the owning [`TransitionMonoid`].
pub type MonoidSet = FixedBitSet;

/// Above this many monoid elements products are computed by walking
/// witnesses instead of reading a table.
const PRODUCT_TABLE_LIMIT: usize = 1024;

/// The powerset of a transition monoid.
#[derive(Clone, Debug)]
pub struct PowersetKa {
    monoid: Arc<TransitionMonoid>,
    products: Option<Arc<Vec<u32>>>,
}

impl PowersetKa {
    pub fn new(monoid: Arc<TransitionMonoid>) -> PowersetKa {
        let n = monoid.len();
        let products = (n <= PRODUCT_TABLE_LIMIT).then(|| {
            let mut table = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    table.push(monoid.multiply(i, j) as u32);
                }
            }
            Arc::new(table)
        });
        PowersetKa { monoid, products }
    }

    pub fn monoid(&self) -> &TransitionMonoid {
        &self.monoid
    }

    fn product(&self, i: usize, j: usize) -> usize {
        match &self.products {
            Some(t) => t[i * self.monoid.len() + j] as usize,
            None => self.monoid.multiply(i, j),
        }
    }

    pub fn empty_set(&self) -> MonoidSet {
        FixedBitSet::with_capacity(self.monoid.len())
    }

    pub fn singleton(&self, m: usize) -> MonoidSet {
        let mut s = self.empty_set();
        s.insert(m);
        s
    }

    /// Monoid indices of the members of `s`, ascending.
    pub fn members(&self, s: &MonoidSet) -> Vec<usize> {
        s.ones().collect()
    }

    /// The relations in `s`, in relation order.
    pub fn relations(&self, s: &MonoidSet) -> Vec<Relation> {
        let mut out: Vec<Relation> = s.ones().map(|m| self.monoid.element(m).clone()).collect();
        out.sort();
        out
    }

    fn name(&self, m: usize) -> String {
        let w = self.monoid.witness(m);
        if self.monoid.element(m).is_empty() {
            "∅".to_string()
        } else if w.is_empty() {
            "id".to_string()
        } else {
            format!("δ_{}", w.as_plain())
        }
    }
}

impl KleeneAlgebra for PowersetKa {
    type Elem = MonoidSet;

    fn zero(&self) -> MonoidSet {
        self.empty_set()
    }

    fn one(&self) -> MonoidSet {
        self.singleton(self.monoid.identity())
    }

    fn plus(&self, x: &MonoidSet, y: &MonoidSet) -> MonoidSet {
        let mut out = x.clone();
        out.union_with(y);
        out
    }

    fn times(&self, x: &MonoidSet, y: &MonoidSet) -> MonoidSet {
        let mut out = self.empty_set();
        let right: Vec<usize> = y.ones().collect();
        for i in x.ones() {
            for &j in &right {
                out.insert(self.product(i, j));
            }
        }
        out
    }

    /// Least set containing the identity and closed under right
    /// multiplication by members of `x`.
    fn star(&self, x: &MonoidSet) -> MonoidSet {
        let gens: Vec<usize> = x.ones().collect();
        let mut out = self.one();
        let mut queue = VecDeque::from([self.monoid.identity()]);
        while let Some(s) = queue.pop_front() {
            for &g in &gens {
                let p = self.product(s, g);
                if !out.put(p) {
                    queue.push_back(p);
                }
            }
        }
        out
    }

    fn show(&self, x: &MonoidSet) -> String {
        let names: Vec<String> = x.ones().map(|m| self.name(m)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// `𝒫(M)` for a transition monoid.
pub fn monoid_to_ka(monoid: TransitionMonoid) -> PowersetKa {
    PowersetKa::new(Arc::new(monoid))
}

/// Relations on the points `{0, .., n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationalKa {
    n: usize,
}

impl RelationalKa {
    /// Largest index of the base set.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> usize {
        self.n + 1
    }

    pub fn relation<I: IntoIterator<Item = (usize, usize)>>(&self, pairs: I) -> Result<Relation> {
        Relation::from_pairs(self.points(), pairs)
    }
}

/// `Kₙ`: relations on `{0, .., n}`.
pub fn relational_ka(n: usize) -> RelationalKa {
    RelationalKa { n }
}

impl KleeneAlgebra for RelationalKa {
    type Elem = Relation;

    fn zero(&self) -> Relation {
        Relation::empty(self.points())
    }

    fn one(&self) -> Relation {
        Relation::identity(self.points())
    }

    fn plus(&self, x: &Relation, y: &Relation) -> Relation {
        x.union_unchecked(y)
    }

    fn times(&self, x: &Relation, y: &Relation) -> Relation {
        x.compose_unchecked(y)
    }

    fn star(&self, x: &Relation) -> Relation {
        x.star()
    }

    fn show(&self, x: &Relation) -> String {
        x.to_string()
    }
}

/// An element of a [`FiniteKa`] together with its printed form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KaElement {
    pub index: usize,
    pub display: String,
}

/// A Kleene algebra given by explicit tables over the carrier `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteKa {
    names: Vec<String>,
    plus: Vec<u32>,
    times: Vec<u32>,
    star: Vec<u32>,
    zero: usize,
    one: usize,
}

pub const DEFAULT_CARRIER_BUDGET: usize = 1024;

impl FiniteKa {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn element(&self, i: usize) -> KaElement {
        KaElement {
            index: i,
            display: self.names[i].clone(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Tables of `ka` restricted to `carrier`, which must contain 0 and 1 and
    /// be closed under the operations.
    pub fn tabulate<K: KleeneAlgebra>(ka: &K, carrier: Vec<K::Elem>) -> Result<FiniteKa> {
        let index: HashMap<K::Elem, usize> = carrier.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        if index.len() != carrier.len() {
            return Err(Error::Malformed("carrier has duplicate elements".into()));
        }
        let find = |x: K::Elem| -> Result<u32> {
            index
                .get(&x)
                .map(|&i| i as u32)
                .ok_or_else(|| Error::Malformed(format!("carrier not closed: {} is missing", ka.show(&x))))
        };
        let n = carrier.len();
        let mut plus = Vec::with_capacity(n * n);
        let mut times = Vec::with_capacity(n * n);
        for x in &carrier {
            for y in &carrier {
                plus.push(find(ka.plus(x, y))?);
                times.push(find(ka.times(x, y))?);
            }
        }
        let star = carrier.iter().map(|x| find(ka.star(x))).collect::<Result<Vec<_>>>()?;
        Ok(FiniteKa {
            names: carrier.iter().map(|x| ka.show(x)).collect(),
            plus,
            times,
            star,
            zero: find(ka.zero())? as usize,
            one: find(ka.one())? as usize,
        })
    }

    /// The subalgebra generated by `gens`, tabulated. Generator `i` gets
    /// index `i + 2` unless it coincides with 0, 1 or an earlier generator;
    /// use the returned map to locate them.
    pub fn generated<K: KleeneAlgebra>(ka: &K, gens: &[K::Elem], budget: usize) -> Result<(FiniteKa, Vec<usize>)> {
        let mut elems: Vec<K::Elem> = Vec::new();
        let mut index: HashMap<K::Elem, usize> = HashMap::new();
        let mut add = |x: K::Elem, elems: &mut Vec<K::Elem>| -> Result<usize> {
            if let Some(&i) = index.get(&x) {
                return Ok(i);
            }
            if elems.len() >= budget {
                return Err(Error::Budget {
                    what: "finite algebra carrier",
                    limit: budget,
                    needed: elems.len() + 1,
                });
            }
            index.insert(x.clone(), elems.len());
            elems.push(x);
            Ok(elems.len() - 1)
        };
        add(ka.zero(), &mut elems)?;
        add(ka.one(), &mut elems)?;
        let positions = gens
            .iter()
            .map(|g| add(g.clone(), &mut elems))
            .collect::<Result<Vec<_>>>()?;
        let mut done = 0;
        while done < elems.len() {
            let k = done;
            done += 1;
            let xk = elems[k].clone();
            add(ka.star(&xk), &mut elems)?;
            for i in 0..=k {
                let xi = elems[i].clone();
                add(ka.plus(&xi, &xk), &mut elems)?;
                add(ka.times(&xi, &xk), &mut elems)?;
                add(ka.times(&xk, &xi), &mut elems)?;
            }
        }
        Ok((FiniteKa::tabulate(ka, elems)?, positions))
    }

    /// All of `𝒫(M)` when `2^|M| ≤ budget`.
    pub fn full_powerset(ka: &PowersetKa, budget: usize) -> Result<FiniteKa> {
        let m = ka.monoid().len();
        let size = checked_pow2(m, budget, "powerset carrier")?;
        let carrier = (0..size)
            .map(|bits| {
                let mut s = ka.empty_set();
                for i in (0..m).filter(|i| bits >> i & 1 == 1) {
                    s.insert(i);
                }
                s
            })
            .collect();
        FiniteKa::tabulate(ka, carrier)
    }

    /// All relations on `{0, .., n}` when `2^((n+1)²) ≤ budget`.
    pub fn full_relational(ka: &RelationalKa, budget: usize) -> Result<FiniteKa> {
        let p = ka.points();
        let size = checked_pow2(p * p, budget, "relational carrier")?;
        let carrier = (0..size)
            .map(|bits| {
                let pairs = (0..p * p).filter(|k| bits >> k & 1 == 1).map(|k| (k / p, k % p));
                Relation::from_pairs(p, pairs)
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteKa::tabulate(ka, carrier)
    }
}

fn checked_pow2(bits: usize, budget: usize, what: &'static str) -> Result<usize> {
    match 1usize
        .checked_shl(bits as u32)
        .filter(|&s| bits < usize::BITS as usize && s <= budget)
    {
        Some(s) => Ok(s),
        None => Err(Error::Budget {
            what,
            limit: budget,
            needed: 1usize.checked_shl(bits as u32).unwrap_or(usize::MAX),
        }),
    }
}

impl KleeneAlgebra for FiniteKa {
    type Elem = usize;

    fn zero(&self) -> usize {
        self.zero
    }

    fn one(&self) -> usize {
        self.one
    }

    fn plus(&self, x: &usize, y: &usize) -> usize {
        self.plus[x * self.len() + y] as usize
    }

    fn times(&self, x: &usize, y: &usize) -> usize {
        self.times[x * self.len() + y] as usize
    }

    fn star(&self, x: &usize) -> usize {
        self.star[*x] as usize
    }

    fn show(&self, x: &usize) -> String {
        self.names[*x].clone()
    }
}

/// Carriers up to this size are checked on every triple.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 64;
/// Triples sampled for larger carriers.
pub const SAMPLED_AXIOM_TRIPLES: usize = 1000;

pub const AXIOMS: [&str; 13] = [
    "x+0=x",
    "x+x=x",
    "x+y=y+x",
    "x+(y+z)=(x+y)+z",
    "x.(y.z)=(x.y).z",
    "x.(y+z)=x.y+x.z",
    "(x+y).z=x.z+y.z",
    "x.1=x",
    "1.x=x",
    "x.0=0",
    "0.x=0",
    "1+x.x*=x*",
    "x+y.z<=z => y*.x<=z",
];

/// Names of the axioms failing at `(x, y, z)`.
pub fn axiom_violations<K: KleeneAlgebra>(ka: &K, x: &K::Elem, y: &K::Elem, z: &K::Elem) -> Vec<&'static str> {
    let (zero, one) = (ka.zero(), ka.one());
    let p = |a: &K::Elem, b: &K::Elem| ka.plus(a, b);
    let t = |a: &K::Elem, b: &K::Elem| ka.times(a, b);
    let checks = [
        p(x, &zero) == *x,
        p(x, x) == *x,
        p(x, y) == p(y, x),
        p(x, &p(y, z)) == p(&p(x, y), z),
        t(x, &t(y, z)) == t(&t(x, y), z),
        t(x, &p(y, z)) == p(&t(x, y), &t(x, z)),
        t(&p(x, y), z) == p(&t(x, z), &t(y, z)),
        t(x, &one) == *x,
        t(&one, x) == *x,
        t(x, &zero) == zero,
        t(&zero, x) == zero,
        p(&one, &t(x, &ka.star(x))) == ka.star(x),
        !ka.leq(&p(x, &t(y, z)), z) || ka.leq(&t(&ka.star(y), x), z),
    ];
    AXIOMS
        .iter()
        .zip(checks)
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub law: &'static str,
    pub x: String,
    pub y: String,
    pub z: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub carrier: usize,
    pub exhaustive: bool,
    pub triples: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The axiom battery: every triple when the carrier has at most
/// [`EXHAUSTIVE_AXIOM_LIMIT`] elements, otherwise [`SAMPLED_AXIOM_TRIPLES`]
/// triples drawn with `seed`.
pub fn check_axioms(ka: &FiniteKa, seed: u64) -> AxiomReport {
    let n = ka.len();
    let mut violations = Vec::new();
    let mut visit = |x: usize, y: usize, z: usize| {
        for law in axiom_violations(ka, &x, &y, &z) {
            violations.push(AxiomViolation {
                law,
                x: ka.show(&x),
                y: ka.show(&y),
                z: ka.show(&z),
            });
        }
    };
    let exhaustive = n <= EXHAUSTIVE_AXIOM_LIMIT;
    let triples = if exhaustive {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    visit(x, y, z);
                }
            }
        }
        n * n * n
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_AXIOM_TRIPLES {
            visit(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        }
        SAMPLED_AXIOM_TRIPLES
    };
    AxiomReport {
        carrier: n,
        exhaustive,
        triples,
        violations,
    }
}

/// A KA with an assignment of its elements to letters.
#[derive(Clone, Debug)]
pub struct Interpretation<K: KleeneAlgebra> {
    pub ka: K,
    pub assignment: BTreeMap<Letter, K::Elem>,
}

impl<K: KleeneAlgebra> Interpretation<K> {
    pub fn new(ka: K, assignment: BTreeMap<Letter, K::Elem>) -> Interpretation<K> {
        Interpretation { ka, assignment }
    }

    pub fn get(&self, a: Letter) -> Result<&K::Elem> {
        self.assignment.get(&a).ok_or(Error::UnassignedLetter(a))
    }
}

/// `ĥ(e)`: the homomorphic extension of the assignment.
pub fn interpret<K: KleeneAlgebra>(h: &Interpretation<K>, e: &Expr) -> Result<K::Elem> {
    let ka = &h.ka;
    Ok(match e.kind() {
        ExprKind::Zero => ka.zero(),
        ExprKind::One => ka.one(),
        ExprKind::Atom(a) => h.get(*a)?.clone(),
        ExprKind::Plus(l, r) => ka.plus(&interpret(h, l)?, &interpret(h, r)?),
        ExprKind::Times(l, r) => ka.times(&interpret(h, l)?, &interpret(h, r)?),
        ExprKind::Star(x) => ka.star(&interpret(h, x)?),
    })
}

/// `𝒦ₑ` and `hₑ` over the letters of `e`.
pub fn canonical_model(e: &Expr) -> Result<Interpretation<PowersetKa>> {
    canonical_model_over(e, e.letters(), DEFAULT_MONOID_BUDGET)
}

/// `𝒦ₑ` and `hₑ` with `Aₑ` built over `alphabet` (which should contain the
/// letters of every expression to be interpreted).
pub fn canonical_model_over<I: IntoIterator<Item = Letter>>(
    e: &Expr,
    alphabet: I,
    monoid_budget: usize,
) -> Result<Interpretation<PowersetKa>> {
    let nfa = antimirov_automaton_over(e, alphabet);
    automaton_model(&nfa, monoid_budget)
}

/// `𝒫(M)` for the transition monoid of `nfa`, with `a ↦ {δ_a}`.
pub fn automaton_model(nfa: &Nfa, monoid_budget: usize) -> Result<Interpretation<PowersetKa>> {
    let monoid = transition_monoid_with_budget(nfa, monoid_budget)?;
    let ka = monoid_to_ka(monoid);
    let assignment = ka
        .monoid()
        .alphabet()
        .iter()
        .map(|&a| {
            let m = ka.monoid().generator_index(a).expect("letter of the monoid alphabet");
            (a, ka.singleton(m))
        })
        .collect();
    Ok(Interpretation::new(ka, assignment))
}

/// `{ δ_w : w ∈ L(nfa) }` as monoid indices, computed by exploring pairs of
/// an automaton state and a monoid element. Independent of [`interpret`].
pub fn language_image(monoid: &TransitionMonoid, nfa: &Nfa) -> Result<BTreeSet<usize>> {
    let letters: Vec<Letter> = nfa.alphabet().to_vec();
    for &a in &letters {
        if monoid.generator(a).is_none() {
            return Err(Error::UnassignedLetter(a));
        }
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for &q in nfa.initial() {
        if seen.insert((q, monoid.identity())) {
            queue.push_back((q, monoid.identity()));
        }
    }
    let mut image = BTreeSet::new();
    while let Some((q, m)) = queue.pop_front() {
        if nfa.is_final(q) {
            image.insert(m);
        }
        for &a in &letters {
            let next = monoid.step(m, a).expect("checked above");
            for &q2 in nfa.successors(q, a) {
                if seen.insert((q2, next)) {
                    queue.push_back((q2, next));
                }
            }
        }
    }
    Ok(image)
}

/// `h_w` into `K_|w|`: letter `a` goes to `{ (i, i+1) : a_i = a }`. Every
/// letter of `w` is assigned; use [`word_interpretation_over`] to also send
/// other letters to the empty relation.
pub fn word_interpretation(w: &Word) -> Interpretation<RelationalKa> {
    word_interpretation_over(w, w.letters().iter().copied())
}

pub fn word_interpretation_over<I: IntoIterator<Item = Letter>>(w: &Word, alphabet: I) -> Interpretation<RelationalKa> {
    let ka = relational_ka(w.len());
    let mut assignment: BTreeMap<Letter, Relation> = alphabet.into_iter().map(|a| (a, ka.zero())).collect();
    for (i, &a) in w.letters().iter().enumerate() {
        assignment.entry(a).or_insert_with(|| ka.zero()).insert(i, i + 1);
    }
    Interpretation::new(ka, assignment)
}

/// A word model separating two expressions.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub word: Word,
    pub point: (usize, usize),
    /// The side whose interpretation contains `point`.
    pub side: Side,
    pub interpretation: Interpretation<RelationalKa>,
    pub left: Relation,
    pub right: Relation,
}

impl Countermodel {
    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn to_json(&self) -> CountermodelJson {
        CountermodelJson {
            n: self.n(),
            word: self.word.as_plain(),
            point: [self.point.0, self.point.1],
            side: self.side,
            assignment: self
                .interpretation
                .assignment
                .iter()
                .map(|(a, r)| (a.to_string(), r.pairs().into_iter().map(|(i, j)| [i, j]).collect()))
                .collect(),
        }
    }

    /// Re-derives both interpretations and checks the point lies in exactly
    /// the recorded one.
    pub fn validate(&self, e: &Expr, f: &Expr) -> Result<bool> {
        let l = interpret(&self.interpretation, e)?;
        let r = interpret(&self.interpretation, f)?;
        let (i, j) = self.point;
        let (in_l, in_r) = (l.contains(i, j), r.contains(i, j));
        Ok(in_l != in_r && (in_l == (self.side == Side::Left)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountermodelJson {
    pub n: usize,
    pub word: String,
    pub point: [usize; 2],
    #[serde(rename = "in")]
    pub side: Side,
    pub assignment: BTreeMap<String, Vec<[usize; 2]>>,
}

#[derive(Clone, Debug)]
pub enum CountermodelVerdict {
    Equivalent,
    Witness(Box<Countermodel>),
}

/// Either `ℓ̂(e) = ℓ̂(f)`, or the word model `(K_|w|, h_w)` for a shortest
/// separating word `w`, with the point `(0, |w|)` at which the two
/// interpretations differ.
pub fn countermodel_search(e: &Expr, f: &Expr) -> Result<CountermodelVerdict> {
    let (word, side) = match expr_equiv(e, f) {
        Equivalence::Holds => return Ok(CountermodelVerdict::Equivalent),
        Equivalence::Counterexample { word, side } => (word, side),
    };
    let letters: BTreeSet<Letter> = e.letters().union(&f.letters()).copied().collect();
    let interpretation = word_interpretation_over(&word, letters);
    let left = interpret(&interpretation, e)?;
    let right = interpret(&interpretation, f)?;
    let point = (0, word.len());
    let model = Countermodel {
        word,
        point,
        side,
        interpretation,
        left,
        right,
    };
    assert!(
        model.validate(e, f)?,
        "word model for {} fails to separate {e} and {f}",
        model.word
    );
    Ok(CountermodelVerdict::Witness(Box::new(model)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{alternating_example, antimirov_automaton, step_relation, word_relation};
    use crate::syntax::{enumerate, parse};
    use crate::transform::transition_monoid;

    fn l(c: char) -> Letter {
        Letter::new(c).unwrap()
    }

    fn ex(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn trivial_monoid_gives_two_element_algebra() {
        let a = l('a');
        let mut nfa = Nfa::with_states(1, [a]);
        nfa.add_transition(0, a, 0).unwrap();
        let ka = monoid_to_ka(transition_monoid(&nfa).unwrap());
        let full = FiniteKa::full_powerset(&ka, 64).unwrap();
        assert_eq!(full.len(), 2);
        assert!(check_axioms(&full, 0).passed());
        assert_eq!(ka.star(&ka.zero()), ka.one());
    }

    #[test]
    fn powerset_product_over_alternating_monoid() {
        let alt = alternating_example();
        let ka = monoid_to_ka(transition_monoid(&alt).unwrap());
        let m = ka.monoid();
        let da = ka.singleton(m.index_of(&step_relation(&alt, l('a'))).unwrap());
        let db = ka.singleton(m.index_of(&step_relation(&alt, l('b'))).unwrap());
        let dab = ka.singleton(m.index_of(&word_relation(&alt, &w("ab"))).unwrap());
        assert_eq!(ka.times(&da, &db), dab);
        assert_eq!(ka.show(&ka.times(&da, &da)), "{∅}");
    }

    #[test]
    fn canonical_model_worked_example() {
        let e = ex("a.(b.a)*");
        let h = canonical_model(&e).unwrap();
        assert_eq!(h.ka.monoid().len(), 6);
        let nfa = antimirov_automaton(&e);
        let da = step_relation(&nfa, l('a'));
        let ha = h.get(l('a')).unwrap();
        assert_eq!(h.ka.relations(ha), vec![da.clone()]);

        let he = interpret(&h, &e).unwrap();
        assert_eq!(h.ka.relations(&he), vec![da.clone()]);

        let other = interpret(&h, &ex("a.b*.a")).unwrap();
        let mut expected = vec![Relation::empty(nfa.num_states()), da];
        expected.sort();
        assert_eq!(h.ka.relations(&other), expected);

        assert_eq!(interpret(&h, &Expr::zero()).unwrap(), h.ka.zero());
    }

    #[test]
    fn canonical_model_of_zero() {
        let h = canonical_model(&Expr::zero()).unwrap();
        assert_eq!(h.ka.monoid().len(), 1);
        assert_eq!(h.ka.monoid().base(), 0);
    }

    #[test]
    fn unassigned_letters_are_errors() {
        let h = canonical_model(&ex("a")).unwrap();
        assert!(matches!(interpret(&h, &ex("b")), Err(Error::UnassignedLetter(_))));
    }

    #[test]
    fn relational_examples() {
        let k = relational_ka(2);
        assert_eq!(k.star(&k.zero()), k.one());
        let r = k.relation([(0, 1)]).unwrap();
        assert_eq!(k.star(&r), k.one().union(&r).unwrap());
        let s = k.relation([(1, 2)]).unwrap();
        assert_eq!(k.times(&r, &s), k.relation([(0, 2)]).unwrap());
    }

    #[test]
    fn word_model_examples() {
        let h = word_interpretation(&w("ab"));
        assert_eq!(h.get(l('a')).unwrap().pairs(), vec![(0, 1)]);
        assert_eq!(h.get(l('b')).unwrap().pairs(), vec![(1, 2)]);
        assert!(interpret(&h, &ex("a.b")).unwrap().contains(0, 2));
        assert!(!interpret(&h, &ex("b.a")).unwrap().contains(0, 2));
        assert_eq!(interpret(&h, &Expr::one()).unwrap(), Relation::identity(3));
    }

    #[test]
    fn countermodel_examples() {
        match countermodel_search(&ex("a.b"), &ex("b.a")).unwrap() {
            CountermodelVerdict::Witness(m) => {
                assert_eq!(m.word.as_plain(), "ab");
                assert_eq!(m.n(), 2);
                assert_eq!(m.point, (0, 2));
                assert_eq!(m.side, Side::Left);
                let json = serde_json::to_value(m.to_json()).unwrap();
                assert_eq!(json["in"], "left");
                assert_eq!(json["assignment"]["a"], serde_json::json!([[0, 1]]));
            }
            CountermodelVerdict::Equivalent => panic!("a.b and b.a differ"),
        }
        assert!(matches!(
            countermodel_search(&ex("a*"), &ex("1+a.a*")).unwrap(),
            CountermodelVerdict::Equivalent
        ));
        match countermodel_search(&Expr::zero(), &Expr::one()).unwrap() {
            CountermodelVerdict::Witness(m) => {
                assert!(m.word.is_empty());
                assert_eq!(m.point, (0, 0));
                assert_eq!(m.side, Side::Right);
            }
            CountermodelVerdict::Equivalent => panic!("0 and 1 differ"),
        }
    }

    #[test]
    fn full_tables_pass_the_axioms() {
        for n in 0..=1 {
            let k = FiniteKa::full_relational(&relational_ka(n), 64).unwrap();
            assert_eq!(k.len(), 1 << ((n + 1) * (n + 1)));
            let report = check_axioms(&k, 0);
            assert!(report.exhaustive);
            assert!(report.passed(), "{:?}", report.violations);
        }
        let alt = monoid_to_ka(transition_monoid(&alternating_example()).unwrap());
        let k = FiniteKa::full_powerset(&alt, 64).unwrap();
        assert_eq!(k.len(), 64);
        assert!(check_axioms(&k, 0).passed());
    }

    #[test]
    fn broken_tables_are_caught() {
        let mut k = FiniteKa::full_relational(&relational_ka(0), 64).unwrap();
        // make star of the empty relation empty instead of the identity
        let zero = k.zero;
        k.star[zero] = zero as u32;
        let report = check_axioms(&k, 0);
        assert!(report.violations.iter().any(|v| v.law == "1+x.x*=x*"));
    }

    #[test]
    fn large_carriers_are_sampled() {
        let k = FiniteKa::full_relational(&relational_ka(2), 1024).unwrap();
        assert_eq!(k.len(), 512);
        let report = check_axioms(&k, 7);
        assert!(!report.exhaustive);
        assert_eq!(report.triples, SAMPLED_AXIOM_TRIPLES);
        assert!(report.passed());
    }

    #[test]
    fn budgets_are_enforced() {
        assert!(FiniteKa::full_relational(&relational_ka(3), DEFAULT_CARRIER_BUDGET).is_err());
        let h = word_interpretation(&w("abab"));
        let gens: Vec<Relation> = h.assignment.values().cloned().collect();
        assert!(matches!(
            FiniteKa::generated(&h.ka, &gens, 3),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn generated_subalgebra_contains_generators() {
        let h = word_interpretation(&w("aba"));
        let gens: Vec<Relation> = h.assignment.values().cloned().collect();
        let (k, pos) = FiniteKa::generated(&h.ka, &gens, 4096).unwrap();
        for (g, &p) in gens.iter().zip(&pos) {
            assert_eq!(k.names()[p], g.to_string());
        }
        assert!(check_axioms(&k, 0).passed());
    }

    #[test]
    fn image_matches_interpretation() {
        let e = ex("a.(b.a)*");
        let h = canonical_model(&e).unwrap();
        for f in ["a.b*.a", "(a+b)*", "b.a", "1", "0"] {
            let f = ex(f);
            let image = language_image(h.ka.monoid(), &antimirov_automaton_over(&f, e.letters())).unwrap();
            let direct: BTreeSet<usize> = h.ka.members(&interpret(&h, &f).unwrap()).into_iter().collect();
            assert_eq!(image, direct, "{f}");
        }
    }

    #[test]
    fn word_model_reads_substrings() {
        let g = ex("(a.b)*.a");
        let word = w("abab");
        let h = word_interpretation(&word);
        let r = interpret(&h, &g).unwrap();
        let lang = enumerate(&g, 4).unwrap();
        for i in 0..=4 {
            for j in i..=4 {
                assert_eq!(r.contains(i, j), lang.contains(&word.slice(i, j)), "({i},{j})");
            }
        }
    }
}
