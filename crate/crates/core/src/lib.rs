//! Exact weighted automata over finite and infinite words.
//!
//! Weights, values, thresholds and discount factors are [`Rational`]s.
//! Words are finite or ultimately periodic ([`LassoWord`]); the value of a
//! word is the supremum over runs of the automaton's [`ValueFunction`].

#![allow(clippy::result_large_err)]

pub mod automaton;
pub mod cli;
pub mod closure;
pub mod cutpoint;
pub mod dot;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod format;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod rational;
pub mod robustness;
pub mod suite;
pub mod valuefn;
pub mod word;

pub use automaton::{Transition, ValidationReport, WeightedAutomaton};
pub use closure::{
    closure_table, complement, compose, op_max, op_min, op_sum, AutomatonClass, BuchiAutomaton, ClosureVerdict, Mode,
    Operator,
};
pub use error::{Error, Result};
pub use eval::{eval, eval_finite, eval_lasso, EvalResult};
pub use rational::Rational;
pub use valuefn::{Tag, ValueFunction};
pub use word::{FiniteWord, LassoWord, Word};
