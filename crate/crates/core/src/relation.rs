//! Binary relations on `{0, .., n-1}` stored as row bitsets.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        let words_per_row = n.div_ceil(BITS).max(1);
        Relation {
            n,
            words_per_row,
            bits: vec![0; words_per_row * n],
        }
    }

    pub fn identity(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Result<Relation> {
        let mut r = Relation::empty(n);
        for (i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::Malformed(format!(
                    "pair ({i},{j}) outside a base set of {n} points"
                )));
            }
            r.insert(i, j);
        }
        Ok(r)
    }

    /// Size of the base set.
    pub fn base(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.row(i)[j / BITS] >> (j % BITS) & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.row_mut(i)[j / BITS] |= 1 << (j % BITS);
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.successors(i) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(i);
        (0..self.n).filter(move |&j| row[j / BITS] >> (j % BITS) & 1 == 1)
    }

    fn check_base(&self, other: &Relation) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::MismatchedBase {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_base(other)?;
        Ok(self.union_unchecked(other))
    }

    pub(crate) fn union_unchecked(&self, other: &Relation) -> Relation {
        let mut out = self.clone();
        for (a, b) in out.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        out
    }

    /// Relational composition: `(i, k)` whenever `i self j` and `j other k`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.check_base(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Relation) -> Relation {
        let mut out = Relation::empty(self.n);
        let mut acc = vec![0u64; self.words_per_row];
        for i in 0..self.n {
            acc.fill(0);
            for j in self.successors(i) {
                for (a, b) in acc.iter_mut().zip(other.row(j)) {
                    *a |= b;
                }
            }
            out.row_mut(i).copy_from_slice(&acc);
        }
        out
    }

    /// Reflexive-transitive closure, by iterating `R ↦ id ∪ R ∘ S` to a
    /// fixpoint.
    pub fn star(&self) -> Relation {
        let mut acc = Relation::identity(self.n);
        loop {
            let next = acc.union_unchecked(&acc.compose_unchecked(self));
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

/// Lexicographic order on the sorted pair lists; relations over smaller base
/// sets come first.
impl Ord for Relation {
    fn cmp(&self, other: &Relation) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.pairs().cmp(&other.pairs()))
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Relation) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, j)) in self.pairs().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "({i},{j})")?;
        }
        write!(f, "}}")
    }
}

/// Serializes as the sorted list of `[i, j]` pairs.
impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = self.pairs().into_iter().map(|(i, j)| [i, j]).collect();
        pairs.serialize(s)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(n, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn composition() {
        let r = rel(3, &[(0, 1)]);
        let s = rel(3, &[(1, 2)]);
        assert_eq!(r.compose(&s).unwrap(), rel(3, &[(0, 2)]));
        assert!(s.compose(&r).unwrap().is_empty());
        assert_eq!(r.compose(&Relation::identity(3)).unwrap(), r);
    }

    #[test]
    fn mismatched_base_is_an_error() {
        assert!(matches!(
            rel(2, &[]).compose(&rel(3, &[])),
            Err(Error::MismatchedBase { left: 2, right: 3 })
        ));
    }

    #[test]
    fn star_is_reflexive_transitive_closure() {
        assert_eq!(rel(3, &[]).star(), Relation::identity(3));
        assert_eq!(rel(2, &[(0, 1)]).star(), rel(2, &[(0, 0), (0, 1), (1, 1)]));
        let chain = rel(4, &[(0, 1), (1, 2), (2, 3)]).star();
        assert!(chain.contains(0, 3));
        assert!(!chain.contains(3, 0));
    }

    #[test]
    fn wide_base_sets() {
        let n = 130;
        let r = rel(n, &[(0, 129), (129, 65)]);
        assert_eq!(r.compose(&r).unwrap(), rel(n, &[(0, 65)]));
        assert_eq!(r.to_string(), "{(0,129),(129,65)}");
    }

    #[test]
    fn ordering_follows_pair_lists() {
        let a = rel(3, &[(0, 1)]);
        let b = rel(3, &[(0, 2)]);
        assert!(a < b);
        assert!(rel(3, &[]) < a);
    }
}
