//! Regular expressions over a finite alphabet of lowercase letters.
//!
//! Besides the AST, parser and printer this module carries the derivative
//! calculus used to build Antimirov automata: the nullable test, the partial
//! derivative `derive`, the initial split `initials` and the finite
//! derivative-closed state space `reachset`.
//!
//! Sets of expressions ([`ExprSet`]) compare members structurally. Two
//! expressions with the same language but different trees are distinct
//! members, e.g. `a.(b.a)*` and `1.a.(b.a)*`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum word length accepted by [`enumerate`].
pub const DEFAULT_MAX_ENUM_LEN: usize = 12;
/// Maximum size of the word universe scanned by [`enumerate`].
pub const DEFAULT_ENUM_BUDGET: usize = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "char", into = "char")]
pub struct Letter(char);

impl Letter {
    pub fn new(c: char) -> Result<Letter> {
        if c.is_ascii_lowercase() {
            Ok(Letter(c))
        } else {
            Err(Error::InvalidLetter(c))
        }
    }

    pub fn as_char(self) -> char {
        self.0
    }

    /// The default alphabet `a..=z`.
    pub fn all() -> impl Iterator<Item = Letter> {
        ('a'..='z').map(Letter)
    }
}

impl TryFrom<char> for Letter {
    type Error = Error;
    fn try_from(c: char) -> Result<Letter> {
        Letter::new(c)
    }
}

impl From<Letter> for char {
    fn from(l: Letter) -> char {
        l.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word. The empty word is displayed as `ε`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Parses a word written by juxtaposition. `""`, `"ε"` and `"1"` all
    /// denote the empty word.
    pub fn parse(text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "1" {
            return Ok(Word::empty());
        }
        text.chars().map(Letter::new).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: Letter) {
        self.0.push(a);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The factor `a_i .. a_{j-1}`.
    pub fn slice(&self, i: usize, j: usize) -> Word {
        Word(self.0[i..j].to_vec())
    }

    /// Right-nested product of the letters; `ε` becomes `1`.
    pub fn to_expr(&self) -> Expr {
        match self.0.split_last() {
            None => Expr::one(),
            Some((&last, init)) => init
                .iter()
                .rev()
                .fold(Expr::atom(last), |acc, &a| Expr::times(Expr::atom(a), acc)),
        }
    }

    /// Letters without the `ε` marker; the empty word gives `""`.
    pub fn as_plain(&self) -> String {
        self.0.iter().map(|l| l.0).collect()
    }

    /// Shortest first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Word {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.as_plain())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Zero,
    One,
    Atom(Letter),
    Plus(Expr, Expr),
    Times(Expr, Expr),
    Star(Expr),
}

#[derive(PartialEq, Eq, Hash)]
struct Node {
    kind: ExprKind,
    nullable: bool,
}

/// A shared, immutable expression tree. Cloning is cheap; equality is
/// structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn node(kind: ExprKind) -> Expr {
        let nullable = match &kind {
            ExprKind::Zero | ExprKind::Atom(_) => false,
            ExprKind::One | ExprKind::Star(_) => true,
            ExprKind::Plus(l, r) => l.0.nullable || r.0.nullable,
            ExprKind::Times(l, r) => l.0.nullable && r.0.nullable,
        };
        Expr(Arc::new(Node { kind, nullable }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn zero() -> Expr {
        Expr::node(ExprKind::Zero)
    }

    pub fn one() -> Expr {
        Expr::node(ExprKind::One)
    }

    pub fn atom(a: Letter) -> Expr {
        Expr::node(ExprKind::Atom(a))
    }

    pub fn plus(l: Expr, r: Expr) -> Expr {
        Expr::node(ExprKind::Plus(l, r))
    }

    pub fn times(l: Expr, r: Expr) -> Expr {
        Expr::node(ExprKind::Times(l, r))
    }

    pub fn star(e: Expr) -> Expr {
        Expr::node(ExprKind::Star(e))
    }

    /// Right-nested sum; the empty sum is `0`.
    pub fn sum<I>(terms: I) -> Expr
    where
        I: IntoIterator<Item = Expr>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = terms.into_iter().rev();
        match it.next() {
            None => Expr::zero(),
            Some(last) => it.fold(last, |acc, t| Expr::plus(t, acc)),
        }
    }

    /// Right-nested product; the empty product is `1`.
    pub fn product<I>(factors: I) -> Expr
    where
        I: IntoIterator<Item = Expr>,
        I::IntoIter: DoubleEndedIterator,
    {
        let mut it = factors.into_iter().rev();
        match it.next() {
            None => Expr::one(),
            Some(last) => it.fold(last, |acc, t| Expr::times(t, acc)),
        }
    }

    pub fn parse(text: &str) -> Result<Expr> {
        parse(text)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self.kind() {
            ExprKind::Zero | ExprKind::One | ExprKind::Atom(_) => 1,
            ExprKind::Plus(l, r) | ExprKind::Times(l, r) => 1 + l.size() + r.size(),
            ExprKind::Star(e) => 1 + e.size(),
        }
    }

    pub fn letters(&self) -> BTreeSet<Letter> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<Letter>) {
        match self.kind() {
            ExprKind::Zero | ExprKind::One => {}
            ExprKind::Atom(a) => {
                out.insert(*a);
            }
            ExprKind::Plus(l, r) | ExprKind::Times(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            ExprKind::Star(e) => e.collect_letters(out),
        }
    }

    fn fmt_at(&self, level: u8, out: &mut String) {
        // level 0: sum position, 1: product operand, 2: star operand
        match self.kind() {
            ExprKind::Zero => out.push('0'),
            ExprKind::One => out.push('1'),
            ExprKind::Atom(a) => out.push(a.0),
            ExprKind::Plus(l, r) => {
                let paren = level > 0;
                if paren {
                    out.push('(');
                }
                l.fmt_at(0, out);
                out.push('+');
                r.fmt_at(1, out);
                if paren {
                    out.push(')');
                }
            }
            ExprKind::Times(l, r) => {
                let paren = level > 1;
                if paren {
                    out.push('(');
                }
                l.fmt_at(1, out);
                out.push('.');
                r.fmt_at(2, out);
                if paren {
                    out.push(')');
                }
            }
            ExprKind::Star(e) => {
                e.fmt_at(2, out);
                out.push('*');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.fmt_at(0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Expr, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Parses the concrete syntax
///
/// ```text
/// expr := sum
/// sum  := prod ("+" prod)*
/// prod := star ("." star)*
/// star := atom "*"*
/// atom := "0" | "1" | letter | "(" expr ")"
/// ```
///
/// Binary operators associate to the left; whitespace is ignored.
pub fn parse(text: &str) -> Result<Expr> {
    let tokens: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser {
        tokens,
        at: 0,
        end: text.chars().count(),
    };
    let e = p.sum()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(p.error(format!("unexpected '{c}'"))),
    }
}

struct Parser {
    tokens: Vec<(usize, char)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.at).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.end, |&(p, _)| p)
    }

    fn error(&self, message: String) -> Error {
        Error::Parse {
            pos: self.pos(),
            message,
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.prod()?;
        while self.peek() == Some('+') {
            self.at += 1;
            e = Expr::plus(e, self.prod()?);
        }
        Ok(e)
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut e = self.star()?;
        while self.peek() == Some('.') {
            self.at += 1;
            e = Expr::times(e, self.star()?);
        }
        Ok(e)
    }

    fn star(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.peek() == Some('*') {
            self.at += 1;
            e = Expr::star(e);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("expected a term, found end of input".into())),
            Some('0') => {
                self.at += 1;
                Ok(Expr::zero())
            }
            Some('1') => {
                self.at += 1;
                Ok(Expr::one())
            }
            Some('(') => {
                self.at += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'".into()));
                }
                self.at += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.at += 1;
                Ok(Expr::atom(Letter(c)))
            }
            Some(c) => Err(self.error(format!("expected a term, found '{c}'"))),
        }
    }
}

/// A finite set of expressions under structural equality, iterated in
/// lexicographic order of the printed forms.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ExprSet(BTreeMap<String, Expr>);

impl ExprSet {
    pub fn new() -> ExprSet {
        ExprSet(BTreeMap::new())
    }

    pub fn singleton(e: Expr) -> ExprSet {
        let mut s = ExprSet::new();
        s.insert(e);
        s
    }

    pub fn insert(&mut self, e: Expr) -> bool {
        let key = e.to_string();
        match self.0.entry(key) {
            std::collections::btree_map::Entry::Occupied(_) => false,
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e);
                true
            }
        }
    }

    pub fn contains(&self, e: &Expr) -> bool {
        self.0.contains_key(&e.to_string())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::collections::btree_map::Values<'_, String, Expr> {
        self.0.values()
    }

    /// Position of `e` in iteration order.
    pub fn index_of(&self, e: &Expr) -> Option<usize> {
        let key = e.to_string();
        self.0.keys().position(|k| *k == key)
    }

    pub fn union(mut self, other: ExprSet) -> ExprSet {
        if self.0.len() < other.0.len() {
            return other.union(self);
        }
        for (k, v) in other.0 {
            self.0.entry(k).or_insert(v);
        }
        self
    }

    /// `S ⨟ e = { s·e : s ∈ S }`.
    pub fn then(&self, e: &Expr) -> ExprSet {
        self.iter().map(|s| Expr::times(s.clone(), e.clone())).collect()
    }

    pub fn is_subset(&self, other: &ExprSet) -> bool {
        self.0.keys().all(|k| other.0.contains_key(k))
    }

    /// Right-nested sum in iteration order; `0` when empty.
    pub fn sum(&self) -> Expr {
        Expr::sum(self.iter().cloned().collect::<Vec<_>>())
    }
}

impl FromIterator<Expr> for ExprSet {
    fn from_iter<I: IntoIterator<Item = Expr>>(iter: I) -> ExprSet {
        let mut s = ExprSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl<'a> IntoIterator for &'a ExprSet {
    type Item = &'a Expr;
    type IntoIter = std::collections::btree_map::Values<'a, String, Expr>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.values()
    }
}

impl fmt::Debug for ExprSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.keys()).finish()
    }
}

/// Whether `ε` belongs to the language of `e`.
///
/// The flag is computed bottom-up when the node is built, following the
/// inductive rules: `1` and `x*` are nullable, a sum when either side is,
/// a product when both sides are.
pub fn nullable(e: &Expr) -> bool {
    e.0.nullable
}

/// Antimirov partial derivative of `e` with respect to `a`.
pub fn derive(e: &Expr, a: Letter) -> ExprSet {
    match e.kind() {
        ExprKind::Zero | ExprKind::One => ExprSet::new(),
        ExprKind::Atom(b) => {
            if *b == a {
                ExprSet::singleton(Expr::one())
            } else {
                ExprSet::new()
            }
        }
        ExprKind::Plus(l, r) => derive(l, a).union(derive(r, a)),
        ExprKind::Times(l, r) => {
            let left = derive(l, a).then(r);
            if nullable(l) {
                left.union(derive(r, a))
            } else {
                left
            }
        }
        ExprKind::Star(inner) => derive(inner, a).then(e),
    }
}

/// The initial split of `e`: a set of expressions whose sum is equivalent
/// to `e`.
pub fn initials(e: &Expr) -> ExprSet {
    match e.kind() {
        ExprKind::Zero => ExprSet::new(),
        ExprKind::One | ExprKind::Atom(_) => ExprSet::singleton(e.clone()),
        ExprKind::Plus(l, r) => initials(l).union(initials(r)),
        ExprKind::Times(l, r) => initials(l).then(r),
        ExprKind::Star(inner) => {
            let mut s = initials(inner).then(e);
            s.insert(Expr::one());
            s
        }
    }
}

/// The finite state space of the Antimirov automaton of `e`. Contains
/// `initials(e)` and is closed under `derive`.
pub fn reachset(e: &Expr) -> ExprSet {
    match e.kind() {
        ExprKind::Zero => ExprSet::new(),
        ExprKind::One => ExprSet::singleton(Expr::one()),
        ExprKind::Atom(_) => {
            let mut s = ExprSet::singleton(e.clone());
            s.insert(Expr::one());
            s
        }
        ExprKind::Plus(l, r) => reachset(l).union(reachset(r)),
        ExprKind::Times(l, r) => reachset(l).then(r).union(reachset(r)),
        ExprKind::Star(inner) => {
            let mut s = reachset(inner).then(e);
            s.insert(Expr::one());
            s
        }
    }
}

/// Membership by iterated derivatives.
pub fn member(w: &Word, e: &Expr) -> bool {
    let mut current = ExprSet::singleton(e.clone());
    for &a in w.letters() {
        current = current.iter().fold(ExprSet::new(), |acc, d| acc.union(derive(d, a)));
        if current.is_empty() {
            return false;
        }
    }
    current.iter().any(nullable)
}

/// All words of length at most `maxlen` in the language of `e`.
///
/// Computed by structural recursion on `e`, independently of the derivative
/// machinery, so it can serve as a reference semantics.
pub fn enumerate(e: &Expr, maxlen: usize) -> Result<BTreeSet<Word>> {
    enumerate_with_budget(e, maxlen, DEFAULT_MAX_ENUM_LEN, DEFAULT_ENUM_BUDGET)
}

pub fn enumerate_with_budget(
    e: &Expr,
    maxlen: usize,
    max_len_limit: usize,
    word_budget: usize,
) -> Result<BTreeSet<Word>> {
    if maxlen > max_len_limit {
        return Err(Error::Budget {
            what: "enumeration length",
            limit: max_len_limit,
            needed: maxlen,
        });
    }
    let sigma = e.letters().len().max(1);
    let mut universe: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..=maxlen {
        universe = universe.saturating_add(layer);
        layer = layer.saturating_mul(sigma);
    }
    if universe > word_budget {
        return Err(Error::Budget {
            what: "enumeration word universe",
            limit: word_budget,
            needed: universe,
        });
    }
    Ok(language_upto(e, maxlen))
}

fn concat_bounded(left: &BTreeSet<Word>, right: &BTreeSet<Word>, maxlen: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for u in left {
        for v in right {
            if u.len() + v.len() <= maxlen {
                out.insert(u.concat(v));
            }
        }
    }
    out
}

fn language_upto(e: &Expr, maxlen: usize) -> BTreeSet<Word> {
    match e.kind() {
        ExprKind::Zero => BTreeSet::new(),
        ExprKind::One => BTreeSet::from([Word::empty()]),
        ExprKind::Atom(a) => {
            if maxlen >= 1 {
                BTreeSet::from([Word(vec![*a])])
            } else {
                BTreeSet::new()
            }
        }
        ExprKind::Plus(l, r) => {
            let mut s = language_upto(l, maxlen);
            s.extend(language_upto(r, maxlen));
            s
        }
        ExprKind::Times(l, r) => concat_bounded(&language_upto(l, maxlen), &language_upto(r, maxlen), maxlen),
        ExprKind::Star(inner) => {
            let base: BTreeSet<Word> = language_upto(inner, maxlen)
                .into_iter()
                .filter(|w| !w.is_empty())
                .collect();
            let mut acc = BTreeSet::from([Word::empty()]);
            loop {
                let next = concat_bounded(&base, &acc, maxlen);
                let before = acc.len();
                acc.extend(next);
                if acc.len() == before {
                    break acc;
                }
            }
        }
    }
}
