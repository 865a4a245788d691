//! The lemma suite: every invariant of the library, run on each expression
//! of a corpus and reported one line per lemma per instance.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::automata::{accepts, antimirov_automaton_over, expr_equiv, expr_subset, language_equiv, word_relation};
use crate::error::{Error, Result};
use crate::fmp::{fmp_sandwich, interp_lower_check, interp_upper_check, FmpOptions};
use crate::models::{
    canonical_model_over, check_axioms, interpret, language_image, relational_ka, word_interpretation_over, FiniteKa,
    Interpretation, KleeneAlgebra, RelationalKa, DEFAULT_CARRIER_BUDGET,
};
use crate::sample::{random_expr, random_word, rewrite};
use crate::solver::solve_automaton;
use crate::syntax::{derive, enumerate, initials, member, nullable, reachset, Expr, Letter, Word};
use crate::transform::{transformation_automaton_in, transition_monoid_with_budget};

/// The worked examples used when no corpus is given.
pub const DEFAULT_CORPUS: [&str; 5] = ["a.(b.a)*", "(a.b)*.a", "a*", "1", "0"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteLine {
    pub status: Status,
    pub lemma: &'static str,
    pub instance: String,
    pub detail: String,
}

impl fmt::Display for SuiteLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:<22} {}", self.status, self.lemma, self.instance)?;
        if !self.detail.is_empty() {
            write!(f, "  ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub lines: Vec<SuiteLine>,
}

impl SuiteReport {
    fn count(&self, s: Status) -> usize {
        self.lines.iter().filter(|l| l.status == s).count()
    }

    pub fn passed(&self) -> usize {
        self.count(Status::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(Status::Fail)
    }

    pub fn skipped(&self) -> usize {
        self.count(Status::Skip)
    }
}

/// Runs every lemma on every corpus expression. Instances run in parallel;
/// lines come out in corpus order.
pub fn lemma_suite(corpus: &[Expr], seed: u64, opts: &FmpOptions) -> SuiteReport {
    let lines = corpus
        .par_iter()
        .enumerate()
        .map(|(i, e)| Instance::new(e, seed.wrapping_add(i as u64), opts).run())
        .collect::<Vec<_>>()
        .concat();
    SuiteReport { lines }
}

struct Instance<'a> {
    e: &'a Expr,
    /// Letters of `e`, or `a` when it has none, for generating samples.
    sample_letters: Vec<Letter>,
    /// Words up to this length are enumerated.
    len: usize,
    rng: ChaCha8Rng,
    opts: &'a FmpOptions,
    lines: Vec<SuiteLine>,
}

/// Failures found by one lemma; empty means it holds.
type Failures = Vec<String>;

fn all_words(letters: &[Letter], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                letters.iter().map(move |&a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn union(e: &Expr, others: &[&Expr]) -> BTreeSet<Letter> {
    let mut s = e.letters();
    for o in others {
        s.extend(o.letters());
    }
    s
}

impl<'a> Instance<'a> {
    fn new(e: &'a Expr, seed: u64, opts: &'a FmpOptions) -> Instance<'a> {
        let letters: Vec<Letter> = e.letters().into_iter().collect();
        let len = match letters.len() {
            0..=2 => 6,
            3..=4 => 4,
            _ => 3,
        };
        let sample_letters = if letters.is_empty() {
            vec![Letter::new('a').expect("valid letter")]
        } else {
            letters
        };
        Instance {
            e,
            sample_letters,
            len,
            rng: ChaCha8Rng::seed_from_u64(seed),
            opts,
            lines: Vec::new(),
        }
    }

    fn letters(&self) -> Vec<Letter> {
        self.e.letters().into_iter().collect()
    }

    fn record(&mut self, lemma: &'static str, outcome: Result<Failures>) {
        let (status, detail) = match outcome {
            Ok(f) if f.is_empty() => (Status::Pass, String::new()),
            Ok(f) => (Status::Fail, format!("{} failures; first: {}", f.len(), f[0])),
            Err(err @ Error::Budget { .. }) => (Status::Skip, err.to_string()),
            Err(err) => (Status::Fail, err.to_string()),
        };
        self.lines.push(SuiteLine {
            status,
            lemma,
            instance: self.e.to_string(),
            detail,
        });
    }

    fn run(mut self) -> Vec<SuiteLine> {
        let e = self.e;
        let lang = match enumerate(e, self.len) {
            Ok(l) => l,
            Err(err) => {
                self.record("enumerate", Err(err));
                return self.lines;
            }
        };
        let words = all_words(&self.letters(), self.len);

        let out = self.reach_closed();
        self.record("reach-closed", Ok(out));
        let out = vec![format!("nullable = {}", nullable(e))];
        self.record(
            "nullable",
            Ok(if nullable(e) == lang.contains(&Word::empty()) {
                vec![]
            } else {
                out
            }),
        );
        let out = words
            .iter()
            .filter(|w| member(w, e) != lang.contains(*w))
            .map(|w| format!("member on {w}"))
            .collect();
        self.record("member-oracle", Ok(out));
        let out = self.iota_correct(&lang);
        self.record("iota-correct", out);
        let out = self.half_fundamental(&lang);
        self.record("half-fundamental", out);

        let nfa = antimirov_automaton_over(e, self.letters());
        let out = words
            .iter()
            .filter(|w| accepts(&nfa, w) != lang.contains(*w))
            .map(|w| format!("automaton on {w}"))
            .collect();
        self.record("antimirov-correct", Ok(out));
        let out = self.word_relation_action(&nfa);
        self.record("word-relation-action", Ok(out));

        let sol = solve_automaton(&nfa, self.opts.solve);
        let out = (0..nfa.num_states())
            .filter(|&q| {
                let at_q = nfa.with_initial([q]).expect("state in range");
                !language_equiv(&antimirov_automaton_over(sol.get(q), []), &at_q).holds()
            })
            .map(|q| format!("state {}", nfa.label(q)))
            .collect();
        self.record("solution-exact", Ok(out));
        let soli = crate::solver::soli_of(&nfa, &sol, self.opts.solve);
        let mut out = Vec::new();
        if !expr_subset(&soli, e).holds() {
            out.push("soli above e".to_string());
        }
        if !expr_equiv(&soli, e).holds() {
            out.push("soli differs from e".to_string());
        }
        self.record("solution-upper", Ok(out));

        let out = self.transform_lemmas(&nfa);
        match out {
            Ok(results) => {
                for (lemma, failures) in results {
                    self.record(lemma, Ok(failures));
                }
            }
            Err(err) => {
                for lemma in ["monoid-witness", "letter", "compose", "shift", "approximate-below"] {
                    self.record(lemma, Err(replay(&err)));
                }
            }
        }

        let out = self.interpretation_lemma();
        self.record("interpretation-lemma", out);
        let out = self.embed_sem(&lang);
        self.record("embed-sem", out);
        let out = self.lang_vs_cont();
        self.record("lang-vs-cont", out);
        let out = self.word_model();
        self.record("word-model", out);
        let out = self.ka_axioms();
        self.record("ka-axioms", out);

        let out = interp_upper_check(e, self.opts).map(|cs| {
            cs.into_iter()
                .filter(|(_, c)| !c.holds)
                .map(|(t, c)| format!("{} on {:?}", t.relation, c.counterexample))
                .collect()
        });
        self.record("interp-upper", out);
        let f = self.rewritten();
        let out = [e, &f]
            .iter()
            .map(|g| interp_lower_check(e, g, self.opts).map(|(_, _, c)| (g.to_string(), c)))
            .collect::<Result<Vec<_>>>()
            .map(|cs| cs.into_iter().filter(|(_, c)| !c.holds).map(|(g, _)| g).collect());
        self.record("interp-lower", out);
        let out = self.sandwich_on_rewrite();
        self.record("fmp-sandwich", out);
        self.lines
    }

    /// Rewrites whose automaton exceeds the budget are redrawn a few times
    /// before the lemma is skipped.
    fn sandwich_on_rewrite(&mut self) -> Result<Failures> {
        let mut last = None;
        for _ in 0..8 {
            let f = self.rewritten();
            let r1 = match fmp_sandwich(self.e, &f, self.opts) {
                Err(err @ Error::Budget { .. }) => {
                    last = Some(err);
                    continue;
                }
                other => other?,
            };
            let r2 = fmp_sandwich(self.e, &f, self.opts)?;
            let mut out = Vec::new();
            if !r1.certified() {
                out.push(format!("{f}: {:?}", r1.verdict));
            }
            if !r1.same_outcome(&r2) {
                out.push("not reproducible".to_string());
            }
            return Ok(out);
        }
        Err(last.expect("at least one draw"))
    }

    fn rewritten(&mut self) -> Expr {
        let letters = self.sample_letters.clone();
        rewrite(&mut self.rng, self.e, 3, &letters)
    }

    fn reach_closed(&self) -> Failures {
        let rho = reachset(self.e);
        let mut out = Vec::new();
        if !initials(self.e).is_subset(&rho) {
            out.push("initials outside the reach set".into());
        }
        for x in rho.iter() {
            for a in self.letters() {
                if !derive(x, a).is_subset(&rho) {
                    out.push(format!("derivative of {x} by {a}"));
                }
            }
            if !reachset(x).is_subset(&rho) {
                out.push(format!("reach set of {x}"));
            }
        }
        out
    }

    fn iota_correct(&self, lang: &BTreeSet<Word>) -> Result<Failures> {
        let mut union = BTreeSet::new();
        for i in initials(self.e).iter() {
            union.extend(enumerate(i, self.len)?);
        }
        Ok(if union == *lang {
            vec![]
        } else {
            vec!["initials denote a different language".into()]
        })
    }

    fn half_fundamental(&self, lang: &BTreeSet<Word>) -> Result<Failures> {
        let mut out = Vec::new();
        if nullable(self.e) && !lang.contains(&Word::empty()) {
            out.push("nullable without the empty word".into());
        }
        if self.len == 0 {
            return Ok(out);
        }
        for a in self.letters() {
            for d in derive(self.e, a).iter() {
                for w in enumerate(d, self.len - 1)? {
                    let aw = Word::from(vec![a]).concat(&w);
                    if !lang.contains(&aw) {
                        out.push(format!("{aw} via {d}"));
                    }
                }
            }
        }
        Ok(out)
    }

    fn word_relation_action(&mut self, nfa: &crate::automata::Nfa) -> Failures {
        let letters = self.sample_letters.clone();
        let mut out = Vec::new();
        for _ in 0..8 {
            let u = random_word(&mut self.rng, 4, &letters);
            let v = random_word(&mut self.rng, 4, &letters);
            let whole = word_relation(nfa, &u.concat(&v));
            let parts = word_relation(nfa, &u).compose(&word_relation(nfa, &v));
            if !matches!(parts, Ok(ref p) if *p == whole) {
                out.push(format!("{u} then {v}"));
            }
        }
        out
    }

    #[allow(clippy::type_complexity)]
    fn transform_lemmas(&mut self, nfa: &crate::automata::Nfa) -> Result<Vec<(&'static str, Failures)>> {
        const SAMPLES: usize = 16;
        let m = transition_monoid_with_budget(nfa, self.opts.monoid_budget)?;
        let n = m.len();
        let sols = (0..n)
            .map(|r| {
                Ok(solve_automaton(
                    &transformation_automaton_in(&m, m.element(r))?,
                    self.opts.solve,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let soli = |r: usize| sols[r].get(m.identity()).clone();
        let sub = |x: &Expr, y: &Expr| expr_subset(x, y).holds();

        let witness = (0..n)
            .filter(|&k| word_relation(nfa, m.witness(k)) != *m.element(k))
            .map(|k| format!("element {}", m.element(k)))
            .collect();
        let letter = m
            .alphabet()
            .iter()
            .filter(|&&a| !sub(&Expr::atom(a), &soli(m.generator_index(a).expect("alphabet letter"))))
            .map(|a| format!("letter {a}"))
            .collect();
        let pairs: Vec<(usize, usize)> = if n * n <= SAMPLES * 4 {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        } else {
            (0..SAMPLES)
                .map(|_| (self.rng.gen_range(0..n), self.rng.gen_range(0..n)))
                .collect()
        };
        let compose = pairs
            .iter()
            .filter(|&&(r1, r2)| !sub(&Expr::times(soli(r1), soli(r2)), &soli(m.multiply(r1, r2))))
            .map(|(r1, r2)| format!("{} then {}", m.element(*r1), m.element(*r2)))
            .collect();
        let mut shift = Vec::new();
        for _ in 0..SAMPLES {
            let (r1, r2, r3) = (
                self.rng.gen_range(0..n),
                self.rng.gen_range(0..n),
                self.rng.gen_range(0..n),
            );
            if !sub(sols[r2].get(r1), sols[m.multiply(r3, r2)].get(m.multiply(r3, r1))) {
                shift.push(format!("{} {} {}", m.element(r1), m.element(r2), m.element(r3)));
            }
        }
        let base = solve_automaton(nfa, self.opts.solve);
        let mut approx = Vec::new();
        for r in 0..n {
            for (q, qf) in m.element(r).pairs() {
                if nfa.is_final(qf) && !sub(&soli(r), base.get(q)) {
                    approx.push(format!("{} at {}", m.element(r), nfa.label(q)));
                }
            }
        }
        Ok(vec![
            ("monoid-witness", witness),
            ("letter", letter),
            ("compose", compose),
            ("shift", shift),
            ("approximate-below", approx),
        ])
    }

    fn interpretation_lemma(&mut self) -> Result<Failures> {
        let letters = self.sample_letters.clone();
        let mut gs = vec![self.e.clone(), self.rewritten()];
        for _ in 0..3 {
            gs.push(random_expr(&mut self.rng, 8, &letters));
        }
        let refs: Vec<&Expr> = gs.iter().collect();
        let h = canonical_model_over(self.e, union(self.e, &refs), self.opts.monoid_budget)?;
        let mut out = Vec::new();
        for g in &gs {
            let direct: BTreeSet<usize> = h.ka.members(&interpret(&h, g)?).into_iter().collect();
            let nfa = antimirov_automaton_over(g, h.ka.monoid().alphabet().iter().copied());
            if direct != language_image(h.ka.monoid(), &nfa)? {
                out.push(g.to_string());
            }
        }
        Ok(out)
    }

    fn random_relational(&mut self, n: usize, letters: &BTreeSet<Letter>) -> Interpretation<RelationalKa> {
        let ka = relational_ka(n);
        let p = ka.points();
        let assignment = letters
            .iter()
            .map(|&a| {
                let pairs: Vec<(usize, usize)> = (0..p * p)
                    .filter(|_| self.rng.gen_bool(0.3))
                    .map(|k| (k / p, k % p))
                    .collect();
                (a, ka.relation(pairs).expect("pairs in range"))
            })
            .collect();
        Interpretation::new(ka, assignment)
    }

    fn embed_sem(&mut self, lang: &BTreeSet<Word>) -> Result<Failures> {
        let e = self.e;
        let letters = union(e, &[]);
        let canonical = canonical_model_over(e, letters.clone(), self.opts.monoid_budget)?;
        let relational = self.random_relational(3, &letters);
        let mut out = Vec::new();
        let he = interpret(&canonical, e)?;
        let re = interpret(&relational, e)?;
        for w in lang.iter().filter(|w| w.len() <= 5) {
            let x = w.to_expr();
            if !canonical.ka.leq(&interpret(&canonical, &x)?, &he) {
                out.push(format!("{w} in the canonical model"));
            }
            if !relational.ka.leq(&interpret(&relational, &x)?, &re) {
                out.push(format!("{w} in a relational model"));
            }
        }
        Ok(out)
    }

    fn lang_vs_cont(&mut self) -> Result<Failures> {
        let e = self.e;
        let f = self.rewritten();
        let letters = union(e, &[&f]);
        let mut out = Vec::new();
        for (name, model) in [("e", e), ("f", &f)] {
            let h = canonical_model_over(model, letters.clone(), self.opts.monoid_budget)?;
            if interpret(&h, e)? != interpret(&h, &f)? {
                out.push(format!("canonical model of {name} separates {e} and {f}"));
            }
        }
        for n in 0..=3 {
            let h = self.random_relational(n, &letters);
            if interpret(&h, e)? != interpret(&h, &f)? {
                out.push(format!("K{n} separates {e} and {f}"));
            }
        }
        Ok(out)
    }

    fn word_model(&mut self) -> Result<Failures> {
        let letters = self.sample_letters.clone();
        let mut out = Vec::new();
        for _ in 0..8 {
            let w = random_word(&mut self.rng, 5, &letters);
            let h = word_interpretation_over(&w, union(self.e, &[]));
            let r = interpret(&h, self.e)?;
            let lang = enumerate(self.e, w.len())?;
            for i in 0..=w.len() {
                for j in i..=w.len() {
                    if r.contains(i, j) != lang.contains(&w.slice(i, j)) {
                        out.push(format!("{w} at ({i},{j})"));
                    }
                }
            }
        }
        Ok(out)
    }

    fn ka_axioms(&mut self) -> Result<Failures> {
        let h = canonical_model_over(self.e, union(self.e, &[]), self.opts.monoid_budget)?;
        let gens: Vec<_> = h.assignment.values().cloned().collect();
        let (k, _) = FiniteKa::generated(&h.ka, &gens, DEFAULT_CARRIER_BUDGET)?;
        let report = check_axioms(&k, self.rng.gen());
        Ok(report
            .violations
            .iter()
            .map(|v| format!("{} at x={} y={} z={}", v.law, v.x, v.y, v.z))
            .collect())
    }
}

/// Budget errors are reported once per affected lemma.
fn replay(err: &Error) -> Error {
    match err {
        Error::Budget { what, limit, needed } => Error::Budget {
            what,
            limit: *limit,
            needed: *needed,
        },
        other => Error::Malformed(other.to_string()),
    }
}
