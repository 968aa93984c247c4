#![allow(clippy::result_large_err)]
//! The closure suite must catch a broken construction.

use quantlang::closure::{compose_with, AutomatonClass, Construction, Limits, Mode, Operator};
use quantlang::suite::{closure_cells, run_trial, SuiteKind, SuiteOptions};
use quantlang::{Result, Tag, WeightedAutomaton};

fn negated_dlsup_sum(
    op: Operator,
    a: &WeightedAutomaton,
    b: Option<&WeightedAutomaton>,
    mode: Mode,
    limits: &Limits,
) -> Result<Construction> {
    let mut c = compose_with(op, a, b, mode, limits)?;
    if op == Operator::Sum && c.class == AutomatonClass::new(Tag::LimSup, true) {
        c.automaton = c.automaton.map_weights(|t| -t.weight.clone());
    }
    Ok(c)
}

#[test]
fn negated_weights_in_dlsup_sum_are_detected() {
    let cells = closure_cells();
    let target = AutomatonClass::new(Tag::LimSup, true);
    let c = cells
        .iter()
        .position(|&(class, op)| class == target && op == Operator::Sum)
        .expect("closed cell");
    let opts = SuiteOptions {
        compose: negated_dlsup_sum,
        ..SuiteOptions::default()
    };
    let failures = (0..20)
        .map(|j| run_trial(SuiteKind::Closure, 3, j * cells.len() + c, &opts))
        .filter(|o| o.failure.is_some())
        .count();
    assert!(failures > 0, "mutant survived 20 trials");
}

#[test]
fn mutation_leaves_other_cells_alone() {
    let cells = closure_cells();
    let opts = SuiteOptions {
        compose: negated_dlsup_sum,
        ..SuiteOptions::default()
    };
    for (c, &(class, op)) in cells.iter().enumerate() {
        if class == AutomatonClass::new(Tag::LimSup, true) && op == Operator::Sum {
            continue;
        }
        let o = run_trial(SuiteKind::Closure, 3, c, &opts);
        assert!(o.failure.is_none(), "{class} {op}");
    }
}
