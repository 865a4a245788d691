//! The finite-model pipeline.
//!
//! For expressions `e` and `f`, interpret both in `𝒦ₑ`. If the images
//! agree, the sum `Σ_{R ∈ ĥₑ(f)} ⌊Aₑ[R]⌋` sits between them:
//! `f ≤ Σ ≤ e`. Running the same argument in `𝒦_f` gives `e ≤ f`. Both
//! sandwiches are checked here as language inclusions, and a disagreement of
//! images is reported as a separating finite model.

use std::time::Instant;

use serde::Serialize;

use crate::automata::{antimirov_automaton_over, expr_subset, Inclusion, Nfa};
use crate::error::{Error, Result};
use crate::models::{automaton_model, interpret, Interpretation, PowersetKa};
use crate::relation::Relation;
use crate::solver::{soli, SolveOptions};
use crate::syntax::{Expr, Letter};
use crate::transform::{transformation_automaton_in, DEFAULT_MONOID_BUDGET};

pub use crate::lemmas::{lemma_suite, Status, SuiteLine, SuiteReport, DEFAULT_CORPUS};

pub const DEFAULT_REACH_BUDGET: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct FmpOptions {
    /// Largest Antimirov automaton the pipeline will build a model for.
    pub reach_budget: usize,
    pub monoid_budget: usize,
    pub solve: SolveOptions,
}

impl Default for FmpOptions {
    fn default() -> FmpOptions {
        FmpOptions {
            reach_budget: DEFAULT_REACH_BUDGET,
            monoid_budget: DEFAULT_MONOID_BUDGET,
            solve: SolveOptions::simplifying(),
        }
    }
}

/// `Aₑ` over `alphabet` and its canonical model.
pub struct CanonicalContext {
    pub automaton: Nfa,
    pub model: Interpretation<PowersetKa>,
}

impl CanonicalContext {
    pub fn new<I: IntoIterator<Item = Letter>>(e: &Expr, alphabet: I, opts: &FmpOptions) -> Result<CanonicalContext> {
        let automaton = antimirov_automaton_over(e, alphabet);
        if automaton.num_states() > opts.reach_budget {
            return Err(Error::Budget {
                what: "antimirov states",
                limit: opts.reach_budget,
                needed: automaton.num_states(),
            });
        }
        let model = automaton_model(&automaton, opts.monoid_budget)?;
        Ok(CanonicalContext { automaton, model })
    }

    /// `ĥₑ(g)` as relations in canonical order.
    pub fn image(&self, g: &Expr) -> Result<Vec<Relation>> {
        Ok(self.model.ka.relations(&interpret(&self.model, g)?))
    }

    /// `⌊Aₑ[R]⌋`.
    pub fn solution(&self, r: &Relation, opts: &FmpOptions) -> Result<Expr> {
        let t = transformation_automaton_in(self.model.ka.monoid(), r)?;
        Ok(soli(&t, opts.solve))
    }

    /// `(R, ⌊Aₑ[R]⌋)` for each `R` in `relations`, and their sum.
    pub fn middle(&self, relations: &[Relation], opts: &FmpOptions) -> Result<(Vec<Term>, Expr)> {
        let terms = relations
            .iter()
            .map(|r| {
                Ok(Term {
                    relation: r.clone(),
                    soli: self.solution(r, opts)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = Expr::sum(terms.iter().map(|t| t.soli.clone()).collect::<Vec<_>>());
        Ok((terms, sum))
    }
}

fn union_letters(e: &Expr, f: &Expr) -> Vec<Letter> {
    e.letters().union(&f.letters()).copied().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub relation: Relation,
    pub soli: Expr,
}

/// A language inclusion `left ⊆ right` and its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub claim: String,
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl Check {
    fn run(claim: String, left: &Expr, right: &Expr) -> Check {
        match expr_subset(left, right) {
            Inclusion::Holds => Check {
                claim,
                holds: true,
                counterexample: None,
            },
            Inclusion::Counterexample(w) => Check {
                claim,
                holds: false,
                counterexample: Some(w.to_string()),
            },
        }
    }
}

/// For each `R ∈ ĥₑ(e)`: `⌊Aₑ[R]⌋ ≤ e`.
pub fn interp_upper_check(e: &Expr, opts: &FmpOptions) -> Result<Vec<(Term, Check)>> {
    let ctx = CanonicalContext::new(e, e.letters(), opts)?;
    let (terms, _) = ctx.middle(&ctx.image(e)?, opts)?;
    Ok(terms
        .into_iter()
        .map(|t| {
            let check = Check::run(format!("soli(A[{}]) <= e", t.relation), &t.soli, e);
            (t, check)
        })
        .collect())
}

/// `f ≤ Σ_{R ∈ ĥₑ(f)} ⌊Aₑ[R]⌋`, with `Aₑ` built over the letters of both.
pub fn interp_lower_check(e: &Expr, f: &Expr, opts: &FmpOptions) -> Result<(Vec<Term>, Expr, Check)> {
    let ctx = CanonicalContext::new(e, union_letters(e, f), opts)?;
    let (terms, middle) = ctx.middle(&ctx.image(f)?, opts)?;
    let check = Check::run("f <= middle".to_string(), f, &middle);
    Ok((terms, middle, check))
}

/// One half of the sandwich, run in the canonical model of `model`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Direction {
    /// The expression whose canonical model is used.
    pub model: Expr,
    pub automaton_states: usize,
    pub monoid_size: usize,
    pub image_of_model: Vec<Relation>,
    pub image_of_other: Vec<Relation>,
    /// The two images agree.
    pub precondition: bool,
    pub terms: Vec<Term>,
    pub middle: Option<Expr>,
    /// `other ≤ middle`.
    pub lower: Option<Check>,
    /// `middle ≤ model`.
    pub upper: Option<Check>,
}

impl Direction {
    fn run(model: &Expr, other: &Expr, alphabet: &[Letter], opts: &FmpOptions) -> Result<Direction> {
        let ctx = CanonicalContext::new(model, alphabet.iter().copied(), opts)?;
        let image_of_model = ctx.image(model)?;
        let image_of_other = ctx.image(other)?;
        let mut out = Direction {
            model: model.clone(),
            automaton_states: ctx.automaton.num_states(),
            monoid_size: ctx.model.ka.monoid().len(),
            precondition: image_of_model == image_of_other,
            image_of_model,
            image_of_other,
            terms: Vec::new(),
            middle: None,
            lower: None,
            upper: None,
        };
        if out.precondition {
            let (terms, middle) = ctx.middle(&out.image_of_other, opts)?;
            out.lower = Some(Check::run(format!("{other} <= middle"), other, &middle));
            out.upper = Some(Check::run(format!("middle <= {model}"), &middle, model));
            out.terms = terms;
            out.middle = Some(middle);
        }
        Ok(out)
    }

    fn certified(&self) -> bool {
        self.precondition
            && self.lower.as_ref().is_some_and(|c| c.holds)
            && self.upper.as_ref().is_some_and(|c| c.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FmpVerdict {
    /// All four inclusions hold: `e ≡ f`.
    Certified,
    /// The canonical model of `model` interprets the two sides differently.
    Separated { model: Expr },
    /// An inclusion that the construction guarantees has failed.
    Violation,
}

#[derive(Clone, Debug, Serialize)]
pub struct FmpReport {
    pub left: Expr,
    pub right: Expr,
    pub directions: Vec<Direction>,
    #[serde(flatten)]
    pub verdict: FmpVerdict,
    pub elapsed_ms: u128,
}

impl FmpReport {
    pub fn certified(&self) -> bool {
        self.verdict == FmpVerdict::Certified
    }

    /// Everything except timing, for reproducibility comparisons.
    pub fn same_outcome(&self, other: &FmpReport) -> bool {
        self.left == other.left
            && self.right == other.right
            && self.directions == other.directions
            && self.verdict == other.verdict
    }
}

/// Runs both sandwiches: `f ≤ Σ ≤ e` in `𝒦ₑ` and `e ≤ Σ' ≤ f` in `𝒦_f`.
pub fn fmp_sandwich(e: &Expr, f: &Expr, opts: &FmpOptions) -> Result<FmpReport> {
    let start = Instant::now();
    let alphabet = union_letters(e, f);
    let directions = vec![
        Direction::run(e, f, &alphabet, opts)?,
        Direction::run(f, e, &alphabet, opts)?,
    ];
    let verdict = match directions.iter().find(|d| !d.precondition) {
        Some(d) => FmpVerdict::Separated { model: d.model.clone() },
        None if directions.iter().all(Direction::certified) => FmpVerdict::Certified,
        None => FmpVerdict::Violation,
    };
    Ok(FmpReport {
        left: e.clone(),
        right: f.clone(),
        directions,
        verdict,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Human-readable summary of a report.
pub fn summarize(report: &FmpReport) -> String {
    let mut out = String::new();
    for d in &report.directions {
        let show = |rs: &[Relation]| rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        out.push_str(&format!(
            "model of {}: {} states, monoid of {} elements\n  image of {}: {{{}}}\n  image of {}: {{{}}}\n",
            d.model,
            d.automaton_states,
            d.monoid_size,
            d.model,
            show(&d.image_of_model),
            if d.model == report.left {
                &report.right
            } else {
                &report.left
            },
            show(&d.image_of_other),
        ));
        for c in d.lower.iter().chain(&d.upper) {
            out.push_str(&format!(
                "  {}: {}{}\n",
                c.claim,
                if c.holds { "holds" } else { "fails" },
                c.counterexample
                    .as_ref()
                    .map(|w| format!(" on {w}"))
                    .unwrap_or_default()
            ));
        }
    }
    out.push_str(match &report.verdict {
        FmpVerdict::Certified => "certified: equivalent (finite models and language completeness)",
        FmpVerdict::Separated { .. } => "separated: a canonical model tells them apart",
        FmpVerdict::Violation => "violation: a guaranteed inclusion failed",
    });
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn ex(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn opts() -> FmpOptions {
        FmpOptions::default()
    }

    #[test]
    fn upper_examples() {
        let e = ex("a.(b.a)*");
        let checks = interp_upper_check(&e, &opts()).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(checks[0].1.holds);

        let one = interp_upper_check(&Expr::one(), &opts()).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].1.holds);
        assert!(interp_upper_check(&Expr::zero(), &opts()).unwrap().is_empty());
    }

    #[test]
    fn lower_examples() {
        let e = ex("a.(b.a)*");
        assert!(interp_lower_check(&e, &e, &opts()).unwrap().2.holds);
        let (terms, middle, check) = interp_lower_check(&ex("a"), &Expr::zero(), &opts()).unwrap();
        assert!(terms.is_empty());
        assert_eq!(middle, Expr::zero());
        assert!(check.holds);
        let (terms, _, check) = interp_lower_check(&ex("a"), &ex("b"), &opts()).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].relation.is_empty());
        assert!(check.holds);
    }

    #[test]
    fn sandwich_examples() {
        let r = fmp_sandwich(&ex("a*"), &ex("1+a.a*"), &opts()).unwrap();
        assert!(r.certified(), "{}", summarize(&r));
        let e = ex("(a.b)*.a");
        assert!(fmp_sandwich(&e, &e, &opts()).unwrap().certified());

        let r = fmp_sandwich(&ex("a.b"), &ex("b.a"), &opts()).unwrap();
        assert_eq!(r.verdict, FmpVerdict::Separated { model: ex("a.b") });
        assert_ne!(r.directions[0].image_of_model, r.directions[0].image_of_other);
    }

    #[test]
    fn strict_inclusions_are_separated_by_the_larger_side() {
        // a ≤ a + b, so the model of a cannot separate them
        let r = fmp_sandwich(&ex("a"), &ex("a+b"), &opts()).unwrap();
        assert!(matches!(r.verdict, FmpVerdict::Separated { .. }));
    }

    #[test]
    fn reports_are_reproducible() {
        let (e, f) = (ex("(a+b)*"), ex("(a*.b*)*"));
        let r1 = fmp_sandwich(&e, &f, &opts()).unwrap();
        let r2 = fmp_sandwich(&e, &f, &opts()).unwrap();
        assert!(r1.certified());
        assert!(r1.same_outcome(&r2));
        let json = serde_json::to_value(&r1).unwrap();
        assert_eq!(json["verdict"], "certified");
    }

    #[test]
    fn budget_errors_surface() {
        let tight = FmpOptions {
            reach_budget: 1,
            ..FmpOptions::default()
        };
        assert!(matches!(
            fmp_sandwich(&ex("a.b"), &ex("a.b"), &tight),
            Err(Error::Budget { .. })
        ));
    }
}
