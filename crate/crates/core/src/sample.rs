//! Seeded random expressions, automata and words, and language-preserving
//! rewrites for building equivalent pairs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automata::Nfa;
use crate::syntax::{Expr, ExprKind, Letter, Word};

/// A random expression with between 1 and `max_nodes` AST nodes over
/// `letters` (which must be non-empty).
pub fn random_expr<R: Rng>(rng: &mut R, max_nodes: usize, letters: &[Letter]) -> Expr {
    let size = rng.gen_range(1..=max_nodes.max(1));
    expr_of_size(rng, size, letters)
}

/// A random expression with exactly `size` AST nodes.
pub fn expr_of_size<R: Rng>(rng: &mut R, size: usize, letters: &[Letter]) -> Expr {
    match size {
        0 | 1 => match rng.gen_range(0..10) {
            0 => Expr::zero(),
            1 => Expr::one(),
            _ => Expr::atom(*letters.choose(rng).expect("non-empty alphabet")),
        },
        2 => Expr::star(expr_of_size(rng, 1, letters)),
        _ => match rng.gen_range(0..5) {
            0 => Expr::star(expr_of_size(rng, size - 1, letters)),
            k => {
                let left = rng.gen_range(1..size - 1);
                let l = expr_of_size(rng, left, letters);
                let r = expr_of_size(rng, size - 1 - left, letters);
                if k <= 2 {
                    Expr::plus(l, r)
                } else {
                    Expr::times(l, r)
                }
            }
        },
    }
}

/// A random automaton with 1 to `max_states` states over `letters`; each
/// transition is present with probability `density`.
pub fn random_nfa<R: Rng>(rng: &mut R, max_states: usize, letters: &[Letter], density: f64) -> Nfa {
    let n = rng.gen_range(1..=max_states.max(1));
    let mut nfa = Nfa::with_states(n, letters.iter().copied());
    for q in 0..n {
        for &a in letters {
            for t in 0..n {
                if rng.gen_bool(density) {
                    nfa.add_transition(q, a, t).expect("indices in range");
                }
            }
        }
        if rng.gen_bool(0.4) {
            nfa.set_initial(q).expect("index in range");
        }
        if rng.gen_bool(0.4) {
            nfa.set_final(q).expect("index in range");
        }
    }
    if nfa.initial().is_empty() && rng.gen_bool(0.8) {
        nfa.set_initial(rng.gen_range(0..n)).expect("index in range");
    }
    nfa
}

pub fn random_word<R: Rng>(rng: &mut R, max_len: usize, letters: &[Letter]) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| *letters.choose(rng).expect("non-empty alphabet"))
        .collect()
}

/// Applies `steps` random rewrites, each valid in every Kleene algebra, at
/// random positions of `e`.
pub fn rewrite<R: Rng>(rng: &mut R, e: &Expr, steps: usize, letters: &[Letter]) -> Expr {
    let mut cur = e.clone();
    for _ in 0..steps {
        let target = rng.gen_range(0..cur.size());
        let mut counter = 0;
        cur = rewrite_at(rng, &cur, target, &mut counter, letters);
    }
    cur
}

fn rewrite_at<R: Rng>(rng: &mut R, e: &Expr, target: usize, counter: &mut usize, letters: &[Letter]) -> Expr {
    let here = *counter;
    *counter += 1;
    if here == target {
        return rewrite_root(rng, e, letters);
    }
    match e.kind() {
        ExprKind::Zero | ExprKind::One | ExprKind::Atom(_) => e.clone(),
        ExprKind::Plus(l, r) => {
            let l2 = rewrite_at(rng, l, target, counter, letters);
            let r2 = rewrite_at(rng, r, target, counter, letters);
            Expr::plus(l2, r2)
        }
        ExprKind::Times(l, r) => {
            let l2 = rewrite_at(rng, l, target, counter, letters);
            let r2 = rewrite_at(rng, r, target, counter, letters);
            Expr::times(l2, r2)
        }
        ExprKind::Star(x) => Expr::star(rewrite_at(rng, x, target, counter, letters)),
    }
}

fn is_unrolling(e: &Expr) -> Option<Expr> {
    // 1 + x.x*  ->  x*
    if let ExprKind::Plus(one, rest) = e.kind() {
        if let (ExprKind::One, ExprKind::Times(x, s)) = (one.kind(), rest.kind()) {
            if let ExprKind::Star(y) = s.kind() {
                if x == y {
                    return Some(s.clone());
                }
            }
        }
    }
    None
}

/// One rewrite at the root; structure-specific laws are preferred when they
/// apply, otherwise a law that fits any term is used.
fn rewrite_root<R: Rng>(rng: &mut R, e: &Expr, letters: &[Letter]) -> Expr {
    let mut options: Vec<Expr> = Vec::new();
    if let Some(s) = is_unrolling(e) {
        options.push(s);
    }
    match e.kind() {
        ExprKind::Plus(l, r) => {
            options.push(Expr::plus(r.clone(), l.clone()));
            if let ExprKind::Plus(a, b) = l.kind() {
                options.push(Expr::plus(a.clone(), Expr::plus(b.clone(), r.clone())));
            }
            if let ExprKind::Plus(b, c) = r.kind() {
                options.push(Expr::plus(Expr::plus(l.clone(), b.clone()), c.clone()));
            }
            if let (ExprKind::Times(a, b), ExprKind::Times(c, d)) = (l.kind(), r.kind()) {
                if a == c {
                    options.push(Expr::times(a.clone(), Expr::plus(b.clone(), d.clone())));
                }
                if b == d {
                    options.push(Expr::times(Expr::plus(a.clone(), c.clone()), b.clone()));
                }
            }
            if l == r {
                options.push(l.clone());
            }
        }
        ExprKind::Times(l, r) => {
            if let ExprKind::Times(a, b) = l.kind() {
                options.push(Expr::times(a.clone(), Expr::times(b.clone(), r.clone())));
            }
            if let ExprKind::Times(b, c) = r.kind() {
                options.push(Expr::times(Expr::times(l.clone(), b.clone()), c.clone()));
            }
            if let ExprKind::Plus(b, c) = r.kind() {
                options.push(Expr::plus(
                    Expr::times(l.clone(), b.clone()),
                    Expr::times(l.clone(), c.clone()),
                ));
            }
            if let ExprKind::Plus(a, b) = l.kind() {
                options.push(Expr::plus(
                    Expr::times(a.clone(), r.clone()),
                    Expr::times(b.clone(), r.clone()),
                ));
            }
            if matches!(r.kind(), ExprKind::One) {
                options.push(l.clone());
            }
            if matches!(l.kind(), ExprKind::One) {
                options.push(r.clone());
            }
        }
        ExprKind::Star(x) => {
            options.push(Expr::plus(Expr::one(), Expr::times(x.clone(), e.clone())));
            options.push(Expr::plus(Expr::one(), Expr::times(e.clone(), x.clone())));
            options.push(Expr::times(e.clone(), e.clone()));
            options.push(Expr::star(e.clone()));
        }
        _ => {}
    }
    if options.is_empty() || rng.gen_bool(0.25) {
        let junk_size = rng.gen_range(1..=3);
        let junk = expr_of_size(rng, junk_size, letters);
        options.push(match rng.gen_range(0..5) {
            0 => Expr::plus(e.clone(), e.clone()),
            1 => Expr::plus(e.clone(), Expr::zero()),
            2 => Expr::times(e.clone(), Expr::one()),
            3 => Expr::times(Expr::one(), e.clone()),
            _ => Expr::plus(e.clone(), Expr::times(Expr::zero(), junk)),
        });
    }
    options.choose(rng).expect("non-empty").clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::expr_equiv;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> Vec<Letter> {
        vec![Letter::new('a').unwrap(), Letter::new('b').unwrap()]
    }

    #[test]
    fn sizes_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for size in 1..15 {
            for _ in 0..20 {
                assert_eq!(expr_of_size(&mut rng, size, &ab()).size(), size);
            }
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let a: Vec<Expr> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..10).map(|_| random_expr(&mut rng, 10, &ab())).collect()
        };
        let b: Vec<Expr> = {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            (0..10).map(|_| random_expr(&mut rng, 10, &ab())).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn rewrites_preserve_language() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut changed = 0;
        for _ in 0..300 {
            let e = random_expr(&mut rng, 8, &ab());
            let f = rewrite(&mut rng, &e, 3, &ab());
            changed += usize::from(e != f);
            assert!(expr_equiv(&e, &f).holds(), "{e} vs {f}");
        }
        assert!(changed > 250);
    }

    #[test]
    fn unrolling_is_folded_back() {
        let e = crate::syntax::parse("1+a.a*").unwrap();
        assert_eq!(is_unrolling(&e).unwrap().to_string(), "a*");
    }

    #[test]
    fn random_automata_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let nfa = random_nfa(&mut rng, 5, &ab(), 0.3);
            assert!((1..=5).contains(&nfa.num_states()));
            assert_eq!(nfa.alphabet(), ab().as_slice());
        }
    }
}
