//! A Kleene algebra workbench.
//!
//! Regular expressions and their Antimirov automata, least solutions of
//! automata by state elimination, transformation automata over transition
//! monoids, and finite Kleene algebras (powersets of monoids, relations on
//! small sets) in which expressions can be interpreted.
//!
//! Language equality is decided on automata; the finite models are used to
//! extract countermodels and to run the finite-model sandwich
//! `f ≤ Σ_{R ∈ ĥₑ(f)} ⌊Aₑ[R]⌋ ≤ e` at the level of languages.

pub mod automata;
pub mod error;
pub mod fmp;
pub mod lemmas;
pub mod models;
pub mod relation;
pub mod sample;
pub mod solver;
pub mod syntax;
pub mod transform;

pub use error::{Error, Result};
