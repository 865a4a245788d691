//! Least solutions of linear systems over expressions, and through them the
//! least solution `sol(A)` of an automaton.
//!
//! A vector `s` solves `(M, b)` when `b(q) ≤ s(q)` and `M(q, q')·s(q') ≤ s(q)`
//! for all `q, q'`. The vector returned by [`solve_system`] is the least
//! such `s`, and `s·e` is the least `e`-solution for every `e`
//! ([`QVector::scale`]).
//!
//! Elimination pivots on states in ascending index order. For pivot `q` and
//! remaining states `P`:
//!
//! ```text
//! N(p, p') = M(p, p') + M(p, q)·(M(q, q)*·M(q, p'))
//! c(p)     = b(p) + M(p, q)·(M(q, q)*·b(q))
//! s(q)     = M(q, q)*·(b(q) + Σ_{p ∈ P} M(q, p)·t(p))
//! ```
//!
//! where `t` solves `(N, c)`. When `P` is empty the last line is
//! `M(q, q)*·b(q)`.

use serde::{Deserialize, Serialize};

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::syntax::{Expr, ExprKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Apply `x+0 → x`, `x·1 → x`, `x·0 → 0`, `0* → 1` (and their mirror
    /// images, plus `1* → 1`) while building terms.
    pub simplify: bool,
}

impl SolveOptions {
    pub fn simplifying() -> SolveOptions {
        SolveOptions { simplify: true }
    }

    fn plus(self, l: Expr, r: Expr) -> Expr {
        if self.simplify {
            if is_zero(&l) {
                return r;
            }
            if is_zero(&r) {
                return l;
            }
        }
        Expr::plus(l, r)
    }

    fn times(self, l: Expr, r: Expr) -> Expr {
        if self.simplify {
            if is_zero(&l) || is_zero(&r) {
                return Expr::zero();
            }
            if is_one(&l) {
                return r;
            }
            if is_one(&r) {
                return l;
            }
        }
        Expr::times(l, r)
    }

    fn star(self, e: Expr) -> Expr {
        if self.simplify && (is_zero(&e) || is_one(&e)) {
            return Expr::one();
        }
        Expr::star(e)
    }

    /// Right-nested sum in the given order; `0` when empty.
    fn sum(self, terms: Vec<Expr>) -> Expr {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Expr::zero(),
            Some(last) => it.fold(last, |acc, t| self.plus(t, acc)),
        }
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e.kind(), ExprKind::Zero)
}

fn is_one(e: &Expr) -> bool {
    matches!(e.kind(), ExprKind::One)
}

/// A vector of expressions indexed by states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QVector(pub Vec<Expr>);

impl QVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: usize) -> &Expr {
        &self.0[q]
    }

    /// Scalar post-multiplication `(s·e)(q) = s(q)·e`.
    pub fn scale(&self, e: &Expr) -> QVector {
        QVector(self.0.iter().map(|s| Expr::times(s.clone(), e.clone())).collect())
    }
}

/// A square matrix of expressions, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    entries: Vec<Expr>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> QMatrix {
        QMatrix {
            n,
            entries: vec![Expr::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<QMatrix> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("matrix is not square".into()));
        }
        Ok(QMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize, r: usize) -> &Expr {
        &self.entries[q * self.n + r]
    }

    pub fn set(&mut self, q: usize, r: usize, e: Expr) {
        self.entries[q * self.n + r] = e;
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.to_vec())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub labels: Vec<String>,
    pub matrix: QMatrix,
    pub vector: QVector,
}

impl LinearSystem {
    pub fn new(labels: Vec<String>, matrix: QMatrix, vector: QVector) -> Result<LinearSystem> {
        if matrix.dim() != vector.len() || labels.len() != vector.len() {
            return Err(Error::Malformed(format!(
                "system dimensions disagree: {} labels, {}x{} matrix, {} vector entries",
                labels.len(),
                matrix.dim(),
                matrix.dim(),
                vector.len()
            )));
        }
        Ok(LinearSystem { labels, matrix, vector })
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn to_json(&self) -> LinearSystemJson {
        LinearSystemJson {
            states: self.labels.clone(),
            matrix: self.matrix.rows(),
            vector: self.vector.0.clone(),
        }
    }

    pub fn from_json(json: LinearSystemJson) -> Result<LinearSystem> {
        let matrix = QMatrix::from_rows(json.matrix)?;
        LinearSystem::new(json.states, matrix, QVector(json.vector))
    }
}

/// Serialized form of a [`LinearSystem`]; expressions use the concrete
/// syntax.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystemJson {
    pub states: Vec<String>,
    pub matrix: Vec<Vec<Expr>>,
    pub vector: Vec<Expr>,
}

/// Least solution of `(M, b)` by Gaussian-style elimination.
pub fn solve_system(sys: &LinearSystem, opts: SolveOptions) -> QVector {
    let n = sys.dim();
    let mut m = sys.matrix.clone();
    let mut b = sys.vector.0.clone();
    let mut stars = Vec::with_capacity(n);
    for q in 0..n {
        let star = opts.star(m.get(q, q).clone());
        for p in q + 1..n {
            let coef = m.get(p, q).clone();
            if opts.simplify && is_zero(&coef) {
                continue;
            }
            for r in q + 1..n {
                let via = m.get(q, r).clone();
                if opts.simplify && is_zero(&via) {
                    continue;
                }
                let term = opts.times(coef.clone(), opts.times(star.clone(), via));
                let updated = opts.plus(m.get(p, r).clone(), term);
                m.set(p, r, updated);
            }
            let term = opts.times(coef, opts.times(star.clone(), b[q].clone()));
            b[p] = opts.plus(b[p].clone(), term);
        }
        stars.push(star);
    }
    let mut s: Vec<Expr> = vec![Expr::zero(); n];
    for q in (0..n).rev() {
        let mut terms = vec![b[q].clone()];
        for (p, sp) in s.iter().enumerate().skip(q + 1) {
            terms.push(opts.times(m.get(q, p).clone(), sp.clone()));
        }
        s[q] = opts.times(stars[q].clone(), opts.sum(terms));
    }
    QVector(s)
}

/// The system with `b(q) = 1` for final `q` (else `0`) and
/// `M(q, q') = Σ { a : q' ∈ δ(q, a) }` in letter order.
pub fn automaton_to_system(nfa: &Nfa) -> LinearSystem {
    let n = nfa.num_states();
    let mut matrix = QMatrix::zeros(n);
    for q in 0..n {
        let mut row: Vec<Vec<Expr>> = vec![Vec::new(); n];
        for &a in nfa.alphabet() {
            for &t in nfa.successors(q, a) {
                row[t].push(Expr::atom(a));
            }
        }
        for (t, letters) in row.into_iter().enumerate() {
            matrix.set(q, t, Expr::sum(letters));
        }
    }
    let vector = (0..n)
        .map(|q| if nfa.is_final(q) { Expr::one() } else { Expr::zero() })
        .collect();
    LinearSystem {
        labels: nfa.labels().to_vec(),
        matrix,
        vector: QVector(vector),
    }
}

/// `sol(A)`: for each state `q`, an expression denoting `L(A, q)`.
pub fn solve_automaton(nfa: &Nfa, opts: SolveOptions) -> QVector {
    solve_system(&automaton_to_system(nfa), opts)
}

/// Sum of the solutions at the initial states, in index order.
pub fn soli_of(nfa: &Nfa, sol: &QVector, opts: SolveOptions) -> Expr {
    opts.sum(nfa.initial().iter().map(|&q| sol.get(q).clone()).collect())
}

/// `⌊A⌋`: an expression for `L(A)`.
pub fn soli(nfa: &Nfa, opts: SolveOptions) -> Expr {
    soli_of(nfa, &solve_automaton(nfa, opts), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{alternating_example, antimirov_automaton, expr_equiv, Nfa};
    use crate::syntax::{parse, Letter};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn equiv(e: &Expr, f: &str) -> bool {
        expr_equiv(e, &p(f)).holds()
    }

    #[test]
    fn empty_system() {
        let sys = LinearSystem::new(vec![], QMatrix::zeros(0), QVector(vec![])).unwrap();
        assert!(solve_system(&sys, SolveOptions::default()).is_empty());
    }

    #[test]
    fn singleton_system_is_star_times_constant() {
        let sys = LinearSystem::new(
            vec!["q".into()],
            QMatrix::from_rows(vec![vec![p("x")]]).unwrap(),
            QVector(vec![p("y")]),
        )
        .unwrap();
        let s = solve_system(&sys, SolveOptions::default());
        assert_eq!(s.get(0), &p("x*.y"));
        assert_eq!(solve_system(&sys, SolveOptions::simplifying()).get(0), &p("x*.y"));
    }

    #[test]
    fn alternating_system_shape() {
        let sys = automaton_to_system(&alternating_example());
        assert_eq!(sys.vector.get(3), &Expr::one());
        assert_eq!(sys.vector.get(0), &Expr::zero());
        assert_eq!(sys.matrix.get(0, 1), &p("a"));
        assert_eq!(sys.matrix.get(1, 3), &Expr::zero());
        assert_eq!(sys.matrix.get(1, 2), &p("b"));
    }

    #[test]
    fn letters_summed_in_order() {
        let a = Letter::new('a').unwrap();
        let b = Letter::new('b').unwrap();
        let mut nfa = Nfa::with_states(2, [a, b]);
        nfa.add_transition(0, b, 1).unwrap();
        nfa.add_transition(0, a, 1).unwrap();
        let sys = automaton_to_system(&nfa);
        assert_eq!(sys.matrix.get(0, 1), &p("a+b"));
    }

    #[test]
    fn alternating_solution() {
        for opts in [SolveOptions::default(), SolveOptions::simplifying()] {
            let sol = solve_automaton(&alternating_example(), opts);
            assert!(equiv(sol.get(0), "(a.b)*.a"));
            assert!(equiv(sol.get(1), "b.(a.b)*.a"));
            assert!(equiv(sol.get(2), "(a.b)*.a"));
            assert!(equiv(sol.get(3), "1"));
            assert!(equiv(&soli(&alternating_example(), opts), "(a.b)*.a"));
        }
    }

    #[test]
    fn no_finals_means_empty_languages() {
        let a = Letter::new('a').unwrap();
        let mut nfa = Nfa::with_states(3, [a]);
        nfa.add_transition(0, a, 1).unwrap();
        nfa.add_transition(1, a, 2).unwrap();
        nfa.add_transition(2, a, 0).unwrap();
        nfa.set_initial(0).unwrap();
        let sol = solve_automaton(&nfa, SolveOptions::default());
        for q in 0..3 {
            assert!(equiv(sol.get(q), "0"));
        }
        assert_eq!(
            solve_automaton(&nfa, SolveOptions::simplifying()).0,
            vec![Expr::zero(); 3]
        );
    }

    #[test]
    fn soli_without_initial_states_is_zero() {
        let mut nfa = alternating_example().with_initial([]).unwrap();
        nfa.set_final(0).unwrap();
        assert_eq!(soli(&nfa, SolveOptions::default()), Expr::zero());
    }

    #[test]
    fn soli_of_antimirov_automaton() {
        let e = p("a.(b.a)*");
        let s = soli(&antimirov_automaton(&e), SolveOptions::default());
        assert!(expr_equiv(&s, &e).holds());
    }

    #[test]
    fn scaling_gives_e_solutions() {
        let sol = solve_automaton(&alternating_example(), SolveOptions::default());
        let scaled = sol.scale(&p("c"));
        assert!(equiv(scaled.get(3), "c"));
        assert!(equiv(scaled.get(0), "(a.b)*.a.c"));
    }

    #[test]
    fn json_round_trip() {
        let sys = automaton_to_system(&alternating_example());
        let text = serde_json::to_string(&sys.to_json()).unwrap();
        let back = LinearSystem::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, sys);
        let bad = r#"{"states":["p"],"matrix":[["a","b"]],"vector":["1"]}"#;
        assert!(LinearSystem::from_json(serde_json::from_str(bad).unwrap()).is_err());
    }
}
