//! Shipped witness automata and the values they are known to produce.

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::format;
use crate::rational::Rational;

/// A fixture file with example words and their exact values.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    /// `(word literal, value)`.
    pub examples: &'static [(&'static str, &'static str)],
    pub note: &'static str,
}

impl Fixture {
    pub fn automaton(&self) -> WeightedAutomaton {
        format::parse(self.text).expect("shipped fixtures parse")
    }

    pub fn values(&self) -> Vec<(&'static str, Rational)> {
        self.examples
            .iter()
            .map(|(w, v)| (*w, v.parse().expect("fixture value")))
            .collect()
    }
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "disc_gap_witness",
        text: include_str!("../fixtures/disc_gap_witness.wa"),
        examples: &[("a | b", "5/6"), ("| a", "5/2")],
        note: "one state, a-loop (1+λ)/2 and b-loop 0 at λ = 2/3",
    },
    Fixture {
        name: "limavg_count_a",
        text: include_str!("../fixtures/limavg_count_a.wa"),
        examples: &[
            ("| a b", "1/2"),
            ("b a b | a", "1"),
            ("a a b | b", "0"),
            ("| a b b", "1/3"),
        ],
        note: "long-run frequency of a",
    },
    Fixture {
        name: "limavg_count_b",
        text: include_str!("../fixtures/limavg_count_b.wa"),
        examples: &[("| a b b", "2/3"), ("| a b", "1/2")],
        note: "long-run frequency of b",
    },
    Fixture {
        name: "limavg_max_ab",
        text: include_str!("../fixtures/limavg_max_ab.wa"),
        examples: &[("| a b b", "2/3"), ("| a a b", "2/3"), ("| a b", "1/2")],
        note: "nondeterministic max of the a- and b-frequency automata",
    },
    Fixture {
        name: "sum_count_a",
        text: include_str!("../fixtures/sum_count_a.wa"),
        examples: &[("a a b", "2"), ("b", "0")],
        note: "number of a's in a finite word",
    },
    Fixture {
        name: "bank_a1",
        text: include_str!("../fixtures/bank_a1.wa"),
        examples: &[("| g1g2", "80"), ("| b1b2", "26")],
        note: "reward 8 from the good state and 2 from the bad one, λ = 9/10; structure reconstructed",
    },
    Fixture {
        name: "bank_a2",
        text: include_str!("../fixtures/bank_a2.wa"),
        examples: &[("| g1g2", "60"), ("| b1b2", "42")],
        note: "reward 6 from the good state and 4 from the bad one, λ = 9/10; structure reconstructed",
    },
];

pub fn fixture(name: &str) -> Result<&'static Fixture> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::precondition(format!("no fixture named `{name}`")))
}
