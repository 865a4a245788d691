use std::io::Write;
use std::process::{Command, Output};

fn kleene(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kleene"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn equal_expressions_are_equivalent() {
    let o = kleene(&["equiv", "(a.b)*.a", "(a.b)*.a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "equivalent");
}

#[test]
fn sliding_is_an_equivalence() {
    let o = kleene(&["equiv", "(a.b)*.a", "a.(b.a)*"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn inequivalent_expressions_exit_one() {
    let o = kleene(&["equiv", "a*", "a.a*", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["word"], "");
    assert_eq!(v["in"], "left");
}

#[test]
fn countermodel_is_the_shortest_word_model() {
    let o = kleene(&["countermodel", "a.b", "b.a"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["word"], "ab");
    assert_eq!(v["n"], 2);
    assert_eq!(v["point"], serde_json::json!([0, 2]));
    assert_eq!(v["assignment"]["a"], serde_json::json!([[0, 1]]));
    assert_eq!(v["assignment"]["b"], serde_json::json!([[1, 2]]));
}

#[test]
fn countermodel_of_equivalent_pair_exits_zero() {
    let o = kleene(&["countermodel", "a+b", "b+a"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn antimirov_dot_has_five_states() {
    let o = kleene(&["antimirov", "a.(b.a)*", "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("digraph"));
    let nodes = text
        .lines()
        .filter(|l| l.trim_start().starts_with('q') && l.contains("shape="))
        .count();
    assert_eq!(nodes, 5);
    assert_eq!(text.matches("doublecircle").count(), 2);
}

#[test]
fn antimirov_json_reloads_for_solving() {
    let o = kleene(&["antimirov", "a.(b.a)*", "--json"]);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(&o.stdout).unwrap();
    let path = file.path().to_str().unwrap();
    let solved = kleene(&["solve", path, "--simplify", "--json"]);
    assert_eq!(solved.status.code(), Some(0));
    let soli = json(&solved)["soli"].as_str().unwrap().to_string();
    let check = kleene(&["equiv", &soli, "a.(b.a)*"]);
    assert_eq!(check.status.code(), Some(0), "{soli}");
}

#[test]
fn solve_prints_each_state_and_the_total() {
    let o = kleene(&["solve", "(a.b)*.a"]);
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("sol(")).count() >= 2);
    assert!(text.lines().any(|l| l.starts_with("soli = ")));
}

#[test]
fn transform_lists_monoid_with_witnesses() {
    let o = kleene(&["transform", "a.(b.a)*", "--json"]);
    let v = json(&o);
    let monoid = v["monoid"].as_array().unwrap();
    assert_eq!(monoid.len(), 6);
    assert_eq!(monoid[0]["witness"], "");
}

#[test]
fn transform_with_relation_solves_its_automaton() {
    let o = kleene(&["transform", "a.(b.a)*", "--relation", "{(2,1),(3,1)}", "--simplify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let soli = text.lines().find_map(|l| l.strip_prefix("soli = ")).unwrap();
    // words taking the initial state to the final one: the whole language
    let check = kleene(&["equiv", soli, "a+a.b.a.(b.a)*"]);
    assert_eq!(check.status.code(), Some(0), "{soli}");
}

#[test]
fn member_and_enumerate_agree() {
    let o = kleene(&["enumerate", "(a.b)*.a", "--maxlen", "5", "--json"]);
    let words: Vec<String> = serde_json::from_value(json(&o)).unwrap();
    assert_eq!(words, vec!["a", "aba", "ababa"]);
    assert_eq!(kleene(&["member", "aba", "(a.b)*.a"]).status.code(), Some(0));
    assert_eq!(kleene(&["member", "ab", "(a.b)*.a"]).status.code(), Some(1));
}

#[test]
fn parse_prints_a_stable_form() {
    let once = stdout(&kleene(&["parse", "a . (b+1)* "]));
    let twice = stdout(&kleene(&["parse", once.trim()]));
    assert_eq!(once, twice);
}

#[test]
fn interpretation_in_a_word_model() {
    let o = kleene(&["interp", "a.b*", "--model", "word:abb", "--json"]);
    assert_eq!(json(&o), serde_json::json!([[0, 1], [0, 2], [0, 3]]));
}

#[test]
fn interpretation_in_a_relational_model() {
    let o = kleene(&[
        "interp",
        "a.b",
        "--model",
        "rel:2",
        "--assign",
        "a={(0,1)}",
        "--assign",
        "b={(1,2)}",
    ]);
    assert_eq!(stdout(&o).lines().last(), Some("{(0,2)}"));
    let seeded = |s: &str| stdout(&kleene(&["interp", "a*.b", "--model", "rel:3", "--seed", s]));
    assert_eq!(seeded("7"), seeded("7"));
}

#[test]
fn interpretation_in_a_canonical_model() {
    let o = kleene(&["interp", "(a.b)*.a", "--model", "canonical:a.(b.a)*", "--json"]);
    assert_eq!(json(&o)["image"], serde_json::json!([[[2, 1], [3, 1]]]));
}

#[test]
fn fmp_check_certifies_and_separates() {
    let ok = kleene(&["fmp-check", "(a.b)*.a", "a.(b.a)*", "--json"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["verdict"], "certified");
    let no = kleene(&["fmp-check", "a.b", "b.a"]);
    assert_eq!(no.status.code(), Some(1));
}

#[test]
fn lemma_suite_on_a_corpus_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# worked examples\na.(b.a)*\n\n(a+b)*.b").unwrap();
    let o = kleene(&["lemma-suite", "--corpus", file.path().to_str().unwrap(), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    assert!(text.lines().last().unwrap().contains("0 failed"));
    let again = kleene(&["lemma-suite", "--corpus", file.path().to_str().unwrap(), "--seed", "3"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn default_lemma_suite_passes() {
    let o = kleene(&["lemma-suite"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn errors_go_to_stderr_with_exit_two() {
    let o = kleene(&["parse", "a.(b"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));
    assert_eq!(kleene(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(kleene(&["enumerate", "a*", "--maxlen", "40"]).status.code(), Some(2));
    let budget = kleene(&["fmp-check", "(a.b.a.b.a.b.a.b.a.b.a.b)*", "a", "--reach-budget", "4"]);
    assert_eq!(budget.status.code(), Some(2));
}
