use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use kleene::automata::{antimirov_automaton, expr_equiv, Equivalence, Nfa, NfaJson};
use kleene::fmp::{fmp_sandwich, lemma_suite, summarize, FmpOptions, Status, DEFAULT_CORPUS};
use kleene::models::{
    canonical_model_over, countermodel_search, interpret, relational_ka, word_interpretation_over, CountermodelVerdict,
    Interpretation, KleeneAlgebra,
};
use kleene::relation::Relation;
use kleene::solver::{soli_of, solve_automaton, SolveOptions};
use kleene::syntax::{
    enumerate_with_budget, member, parse, Expr, Letter, Word, DEFAULT_ENUM_BUDGET, DEFAULT_MAX_ENUM_LEN,
};
use kleene::transform::{transformation_automaton_in, transition_monoid_with_budget, DEFAULT_MONOID_BUDGET};
use kleene::{Error, Result};

#[derive(Parser)]
#[command(name = "kleene", version, about = "Kleene algebra workbench")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Simplify terms while solving.
    #[arg(long, global = true)]
    simplify: bool,
    /// Largest Antimirov automaton used as a model.
    #[arg(long, global = true, default_value_t = kleene::fmp::DEFAULT_REACH_BUDGET)]
    reach_budget: usize,
    /// Largest transition monoid built.
    #[arg(long, global = true, default_value_t = DEFAULT_MONOID_BUDGET)]
    monoid_budget: usize,
    /// Largest number of words enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUM_BUDGET)]
    enum_budget: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and print an expression.
    Parse { expr: String },
    /// Decide whether a word is in the language of an expression.
    Member { word: String, expr: String },
    /// List the words of an expression up to a length.
    Enumerate {
        expr: String,
        #[arg(long, default_value_t = 4)]
        maxlen: usize,
    },
    /// Build the Antimirov automaton.
    Antimirov {
        expr: String,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Solve the linear system of an automaton (JSON file) or expression.
    Solve { input: String },
    /// Transition monoid, or the transformation automaton of one relation.
    Transform {
        input: String,
        /// A relation such as `{(0,1),(2,2)}`.
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Interpret an expression in a model.
    Interp {
        expr: String,
        /// `canonical:<expr>`, `word:<w>` or `rel:<n>`.
        #[arg(long)]
        model: String,
        /// Letter assignment for `rel:<n>` models, as `a={(0,1)}`;
        /// unassigned letters get seeded random relations.
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Decide language equivalence.
    Equiv { left: String, right: String },
    /// Find a separating word model.
    Countermodel { left: String, right: String },
    /// Run the finite-model sandwich in both directions.
    FmpCheck { left: String, right: String },
    /// Check every lemma on a corpus of expressions.
    LemmaSuite {
        /// One expression per line; `#` starts a comment.
        #[arg(long)]
        corpus: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.common) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn solve_opts(c: Common) -> SolveOptions {
    SolveOptions { simplify: c.simplify }
}

fn fmp_opts(c: Common) -> FmpOptions {
    FmpOptions {
        reach_budget: c.reach_budget,
        monoid_budget: c.monoid_budget,
        ..FmpOptions::default()
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// A JSON automaton file if `input` names one, otherwise the Antimirov
/// automaton of `input` as an expression.
fn load_automaton(input: &str) -> Result<Nfa> {
    if Path::new(input).is_file() {
        let text = fs::read_to_string(input).map_err(|e| Error::Malformed(format!("{input}: {e}")))?;
        let json: NfaJson = serde_json::from_str(&text)?;
        return Nfa::from_json(&json);
    }
    Ok(antimirov_automaton(&parse(input)?))
}

/// Reads `{(0,1),(2,2)}` or `[[0,1],[2,2]]`.
fn parse_relation(text: &str, n: usize) -> Result<Relation> {
    let numbers = text
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| Error::Malformed(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if numbers.len() % 2 != 0 {
        return Err(Error::Malformed(format!("odd number of indices in relation {text}")));
    }
    Relation::from_pairs(n, numbers.chunks(2).map(|p| (p[0], p[1])))
}

fn describe(nfa: &Nfa) -> String {
    let mut out = String::new();
    for q in 0..nfa.num_states() {
        let mut flags = String::new();
        if nfa.initial().contains(&q) {
            flags.push_str(" initial");
        }
        if nfa.is_final(q) {
            flags.push_str(" final");
        }
        out.push_str(&format!("q{q}: {}{flags}\n", nfa.label(q)));
    }
    for (q, a, t) in nfa.transitions() {
        out.push_str(&format!("q{q} -{a}-> q{t}\n"));
    }
    out
}

fn run(command: Command, c: Common) -> Result<u8> {
    match command {
        Command::Parse { expr } => {
            let e = parse(&expr)?;
            if c.json {
                let letters: String = e.letters().iter().map(|l| l.as_char()).collect();
                print_json(&json!({ "expr": e, "size": e.size(), "letters": letters }))?;
            } else {
                println!("{e}");
            }
            Ok(0)
        }
        Command::Member { word, expr } => {
            let (w, e) = (Word::parse(&word)?, parse(&expr)?);
            let holds = member(&w, &e);
            if c.json {
                print_json(&json!({ "word": w.as_plain(), "expr": e, "member": holds }))?;
            } else {
                println!("{holds}");
            }
            Ok(if holds { 0 } else { 1 })
        }
        Command::Enumerate { expr, maxlen } => {
            let e = parse(&expr)?;
            let mut words: Vec<Word> = enumerate_with_budget(&e, maxlen, DEFAULT_MAX_ENUM_LEN, c.enum_budget)?
                .into_iter()
                .collect();
            words.sort_by(|x, y| x.shortlex_cmp(y));
            if c.json {
                print_json(&words.iter().map(|w| w.as_plain()).collect::<Vec<_>>())?;
            } else {
                for w in words {
                    println!("{w}");
                }
            }
            Ok(0)
        }
        Command::Antimirov { expr, dot } => {
            let nfa = antimirov_automaton(&parse(&expr)?);
            if dot {
                print!("{}", nfa.to_dot());
            } else if c.json {
                print_json(&nfa.to_json())?;
            } else {
                print!("{}", describe(&nfa));
            }
            Ok(0)
        }
        Command::Solve { input } => {
            let nfa = load_automaton(&input)?;
            let sol = solve_automaton(&nfa, solve_opts(c));
            let total = soli_of(&nfa, &sol, solve_opts(c));
            if c.json {
                let sol: BTreeMap<&str, &Expr> = (0..nfa.num_states()).map(|q| (nfa.label(q), sol.get(q))).collect();
                print_json(&json!({ "sol": sol, "soli": total }))?;
            } else {
                for q in 0..nfa.num_states() {
                    println!("sol({}) = {}", nfa.label(q), sol.get(q));
                }
                println!("soli = {total}");
            }
            Ok(0)
        }
        Command::Transform { input, relation, dot } => {
            let nfa = load_automaton(&input)?;
            let monoid = transition_monoid_with_budget(&nfa, c.monoid_budget)?;
            let Some(text) = relation else {
                if c.json {
                    let elems: Vec<_> = (0..monoid.len())
                        .map(|k| json!({ "relation": monoid.element(k), "witness": monoid.witness(k).as_plain() }))
                        .collect();
                    print_json(&json!({ "states": nfa.labels(), "monoid": elems }))?;
                } else {
                    for k in 0..monoid.len() {
                        println!("{}  via {}", monoid.element(k), monoid.witness(k));
                    }
                }
                return Ok(0);
            };
            let r = parse_relation(&text, nfa.num_states())?;
            let automaton = transformation_automaton_in(&monoid, &r)?;
            let sol = solve_automaton(&automaton, solve_opts(c));
            let total = sol.get(monoid.identity());
            if dot {
                print!("{}", automaton.to_dot());
            } else if c.json {
                print_json(&json!({ "automaton": automaton.to_json(), "soli": total }))?;
            } else {
                print!("{}", describe(&automaton));
                println!("soli = {total}");
            }
            Ok(0)
        }
        Command::Interp { expr, model, assign } => interp(&parse(&expr)?, &model, &assign, c),
        Command::Equiv { left, right } => {
            let (e, f) = (parse(&left)?, parse(&right)?);
            let verdict = expr_equiv(&e, &f);
            match (&verdict, c.json) {
                (Equivalence::Holds, false) => println!("equivalent"),
                (Equivalence::Counterexample { word, side }, false) => {
                    let side = format!("{side:?}").to_lowercase();
                    println!("inequivalent: {word} is only in the {side} language");
                }
                (Equivalence::Holds, true) => print_json(&json!({ "equivalent": true }))?,
                (Equivalence::Counterexample { word, side }, true) => {
                    print_json(&json!({ "equivalent": false, "word": word.as_plain(), "in": side }))?
                }
            }
            Ok(if verdict.holds() { 0 } else { 1 })
        }
        Command::Countermodel { left, right } => {
            let (e, f) = (parse(&left)?, parse(&right)?);
            match countermodel_search(&e, &f)? {
                CountermodelVerdict::Equivalent => {
                    if c.json {
                        print_json(&json!({ "equivalent": true }))?;
                    } else {
                        println!("equivalent");
                    }
                    Ok(0)
                }
                CountermodelVerdict::Witness(m) => {
                    print_json(&m.to_json())?;
                    Ok(1)
                }
            }
        }
        Command::FmpCheck { left, right } => {
            let (e, f) = (parse(&left)?, parse(&right)?);
            let report = fmp_sandwich(&e, &f, &fmp_opts(c))?;
            if c.json {
                print_json(&report)?;
            } else {
                print!("{}", summarize(&report));
            }
            Ok(if report.certified() { 0 } else { 1 })
        }
        Command::LemmaSuite { corpus } => {
            let exprs = match corpus {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| Error::Malformed(format!("{path}: {e}")))?;
                    text.lines()
                        .map(|l| l.split('#').next().unwrap_or("").trim())
                        .filter(|l| !l.is_empty())
                        .map(parse)
                        .collect::<Result<Vec<_>>>()?
                }
                None => DEFAULT_CORPUS.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?,
            };
            let report = lemma_suite(&exprs, c.seed, &fmp_opts(c));
            if c.json {
                print_json(&report)?;
            } else {
                for line in &report.lines {
                    println!("{line}");
                }
                println!(
                    "{} passed, {} failed, {} skipped",
                    report.passed(),
                    report.failed(),
                    report.skipped()
                );
            }
            Ok(if report.lines.iter().any(|l| l.status == Status::Fail) {
                1
            } else {
                0
            })
        }
    }
}

fn interp(e: &Expr, model: &str, assign: &[String], c: Common) -> Result<u8> {
    let (kind, arg) = model
        .split_once(':')
        .ok_or_else(|| Error::Malformed(format!("model {model:?} is not kind:argument")))?;
    match kind {
        "canonical" => {
            let g = parse(arg)?;
            let letters: BTreeSet<Letter> = g.letters().union(&e.letters()).copied().collect();
            let h = canonical_model_over(&g, letters, c.monoid_budget)?;
            let image = h.ka.relations(&interpret(&h, e)?);
            if c.json {
                print_json(&json!({ "model": g, "image": image }))?;
            } else {
                println!("{}", h.ka.show(&interpret(&h, e)?));
                for r in image {
                    println!("  {r}");
                }
            }
        }
        "word" => {
            let w = Word::parse(arg)?;
            let letters: BTreeSet<Letter> = w.letters().iter().chain(&e.letters()).copied().collect();
            let h = word_interpretation_over(&w, letters);
            show_relation(&interpret(&h, e)?, c)?;
        }
        "rel" => {
            let n: usize = arg
                .parse()
                .map_err(|_| Error::Malformed(format!("rel:{arg} needs a number of points")))?;
            let h = relational_assignment(e, n, assign, c.seed)?;
            if !c.json {
                for (a, r) in &h.assignment {
                    println!("{a} = {r}");
                }
            }
            show_relation(&interpret(&h, e)?, c)?;
        }
        other => return Err(Error::Malformed(format!("unknown model kind {other:?}"))),
    }
    Ok(0)
}

fn show_relation(r: &Relation, c: Common) -> Result<()> {
    if c.json {
        print_json(r)
    } else {
        println!("{r}");
        Ok(())
    }
}

fn relational_assignment(
    e: &Expr,
    n: usize,
    assign: &[String],
    seed: u64,
) -> Result<Interpretation<kleene::models::RelationalKa>> {
    let ka = relational_ka(n);
    let p = ka.points();
    let mut assignment = BTreeMap::new();
    for item in assign {
        let (name, rel) = item
            .split_once('=')
            .ok_or_else(|| Error::Malformed(format!("assignment {item:?} is not letter=relation")))?;
        let mut chars = name.trim().chars();
        let a = match (chars.next(), chars.next()) {
            (Some(ch), None) => Letter::new(ch)?,
            _ => return Err(Error::Malformed(format!("{name:?} is not a letter"))),
        };
        assignment.insert(a, parse_relation(rel, p)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for a in e.letters() {
        if let Entry::Vacant(slot) = assignment.entry(a) {
            let pairs: Vec<(usize, usize)> = (0..p * p)
                .filter(|_| rng.gen_bool(0.3))
                .map(|k| (k / p, k % p))
                .collect();
            slot.insert(ka.relation(pairs)?);
        }
    }
    Ok(Interpretation::new(ka, assignment))
}
