//! Seeded random automata and words for the property suites.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::automaton::{Transition, WeightedAutomaton};
use crate::rational::Rational;
use crate::valuefn::ValueFunction;
use crate::word::{FiniteWord, LassoWord};

/// Shape of a random automaton.
#[derive(Debug, Clone)]
pub struct Shape {
    pub max_states: usize,
    pub symbols: usize,
    /// Weights are drawn from this set.
    pub weights: Vec<Rational>,
    pub deterministic: bool,
    pub valuefn: ValueFunction,
}

impl Shape {
    pub fn new(valuefn: ValueFunction, max_states: usize, symbols: usize, weights: &[Rational]) -> Self {
        Shape {
            max_states,
            symbols,
            weights: weights.to_vec(),
            deterministic: false,
            valuefn,
        }
    }

    pub fn deterministic(mut self, det: bool) -> Self {
        self.deterministic = det;
        self
    }
}

pub fn alphabet(symbols: usize) -> Vec<String> {
    (0..symbols).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// `{0, 1/3, 1/2, 1}`.
pub fn default_weights() -> Vec<Rational> {
    ["0", "1/3", "1/2", "1"].iter().map(|s| s.parse().unwrap()).collect()
}

/// A total automaton with 1 to `max_states` states. Nondeterministic shapes
/// give each `(q, σ)` one or two successors.
pub fn random_automaton<R: Rng>(rng: &mut R, shape: &Shape) -> WeightedAutomaton {
    let n = rng.random_range(1..=shape.max_states.max(1));
    let mut ts = Vec::new();
    for q in 0..n {
        for s in 0..shape.symbols {
            let fanout = if shape.deterministic || n == 1 || rng.random_bool(0.6) {
                1
            } else {
                2
            };
            let mut targets: Vec<usize> = Vec::new();
            while targets.len() < fanout {
                let d = rng.random_range(0..n);
                if !targets.contains(&d) {
                    targets.push(d);
                }
            }
            for dst in targets {
                ts.push(Transition {
                    src: q,
                    symbol: s,
                    dst,
                    weight: shape.weights.choose(rng).expect("weights").clone(),
                });
            }
        }
    }
    WeightedAutomaton::new("r", alphabet(shape.symbols), n, 0, shape.valuefn.clone(), ts).expect("well-formed")
}

/// A lasso with `|prefix| + |period| ≤ max_len`.
pub fn random_lasso<R: Rng>(rng: &mut R, symbols: usize, max_len: usize) -> LassoWord {
    let total = rng.random_range(1..=max_len.max(1));
    let period_len = rng.random_range(1..=total);
    let sigma = alphabet(symbols);
    let mut draw = |k: usize| -> Vec<String> { (0..k).map(|_| sigma.choose(rng).unwrap().clone()).collect() };
    let prefix = draw(total - period_len);
    let period = draw(period_len);
    LassoWord::new(prefix, period).expect("nonempty period")
}

pub fn random_finite<R: Rng>(rng: &mut R, symbols: usize, max_len: usize) -> FiniteWord {
    let len = rng.random_range(1..=max_len.max(1));
    let sigma = alphabet(symbols);
    FiniteWord::new((0..len).map(|_| sigma.choose(rng).unwrap().clone()).collect()).expect("nonempty")
}

/// Every lasso over `symbols` letters with `|prefix| + |period| ≤ max_len`.
pub fn all_lassos(symbols: usize, max_len: usize) -> Vec<LassoWord> {
    let sigma = alphabet(symbols);
    let mut out = Vec::new();
    for total in 1..=max_len {
        for word in all_words(&sigma, total) {
            for split in 0..total {
                out.push(LassoWord::new(word[..split].to_vec(), word[split..].to_vec()).unwrap());
            }
        }
    }
    out
}

fn all_words(sigma: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                sigma.iter().map(move |s| {
                    let mut w2 = w.clone();
                    w2.push(s.clone());
                    w2
                })
            })
            .collect();
    }
    out
}

/// Every finite word over `symbols` letters of length `1..=max_len`.
pub fn all_finite(symbols: usize, max_len: usize) -> Vec<FiniteWord> {
    let sigma = alphabet(symbols);
    (1..=max_len)
        .flat_map(|len| all_words(&sigma, len))
        .map(|w| FiniteWord::new(w).unwrap())
        .collect()
}
