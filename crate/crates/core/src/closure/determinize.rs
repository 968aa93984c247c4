//! Determinization for LimInf and Last automata.

use super::product::explore;
use super::Limits;
use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};

pub fn determinize_liminf(aut: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    determinize_liminf_with(aut, &Limits::default())
}

/// Deterministic LimInf automaton with the same language.
///
/// Let `v_1 < … < v_k` be the weights. For each threshold `v_i` (`i ≥ 2`) a
/// breakpoint set `O_i` follows the runs that have used only transitions of
/// weight `≥ v_i` since the last breakpoint; when it empties it restarts
/// from all current states and the step counts as a breakpoint for `i`.
/// Some run has liminf `≥ v_i` iff breakpoints for `i` stop eventually.
/// A step whose smallest breakpoint index is `i` gets weight `v_{i−1}`, a
/// step without breakpoints gets `v_k`.
pub fn determinize_liminf_with(aut: &WeightedAutomaton, limits: &Limits) -> Result<WeightedAutomaton> {
    if aut.tag() != Tag::LimInf {
        return Err(Error::WrongSemantics {
            operation: "LimInf determinization",
            expected: "LimInf",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    if aut.is_deterministic_unchecked() {
        return Ok(aut.clone());
    }
    let n = aut.num_states();
    if n > limits.max_input_states.min(64) {
        return Err(Error::CapExceeded {
            what: "LimInf determinization input states",
            size: n,
            limit: limits.max_input_states.min(64),
        });
    }
    let vs = aut.weight_set();
    let k = vs.len();
    let step = |set: u64, s: usize, min_weight: Option<&Rational>| -> u64 {
        let mut out = 0u64;
        for q in (0..n).filter(|&q| set >> q & 1 == 1) {
            for t in aut.successors(q, s) {
                if min_weight.is_none_or(|v| t.weight >= *v) {
                    out |= 1 << t.dst;
                }
            }
        }
        out
    };
    // key: [S, O_2, …, O_k]
    let mut init = vec![0u64; k];
    init[0] = 1 << aut.initial();
    explore(aut.alphabet(), aut.valuefn(), init, limits.max_states, |key, s| {
        let set = key[0];
        let mut next = vec![0u64; k];
        next[0] = step(set, s, None);
        let mut lowest_break: Option<usize> = None;
        for i in 1..k {
            let o = key[i];
            if o == 0 {
                next[i] = step(set, s, Some(&vs[i]));
                lowest_break.get_or_insert(i);
            } else {
                next[i] = step(o, s, Some(&vs[i]));
            }
        }
        let weight = match lowest_break {
            Some(i) => vs[i - 1].clone(),
            None => vs[k - 1].clone(),
        };
        vec![(next, weight)]
    })
    .map(|d| d.with_name(format!("det_{}", aut.name())))
}

/// Subset construction for Last automata: the weight of a subset step is
/// the largest weight among the transitions it summarizes.
pub fn determinize_last(aut: &WeightedAutomaton, limits: &Limits) -> Result<WeightedAutomaton> {
    if aut.valuefn() != &ValueFunction::Last {
        return Err(Error::WrongSemantics {
            operation: "Last determinization",
            expected: "Last",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    let n = aut.num_states();
    if n > 64 {
        return Err(Error::CapExceeded {
            what: "Last determinization input states",
            size: n,
            limit: 64,
        });
    }
    explore(
        aut.alphabet(),
        aut.valuefn(),
        1u64 << aut.initial(),
        limits.max_states,
        |&set, s| {
            let mut out = 0u64;
            let mut best: Option<Rational> = None;
            for q in (0..n).filter(|&q| set >> q & 1 == 1) {
                for t in aut.successors(q, s) {
                    out |= 1 << t.dst;
                    if best.as_ref().is_none_or(|b| t.weight > *b) {
                        best = Some(t.weight.clone());
                    }
                }
            }
            vec![(out, best.expect("total automaton"))]
        },
    )
    .map(|d| d.with_name(format!("det_{}", aut.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_finite, eval_lasso};
    use crate::word::{FiniteWord, LassoWord};

    #[test]
    fn deterministic_input_is_returned_unchanged() {
        let a = WeightedAutomaton::builder("d", &["a", "b"], ValueFunction::LimInf)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        assert_eq!(determinize_liminf(&a).unwrap(), a);
    }

    #[test]
    fn guess_eventually_a() {
        // value 1 iff the word is eventually a^ω
        let a = WeightedAutomaton::builder("ev_a", &["a", "b"], ValueFunction::LimInf)
            .states(2)
            .trans(0, "a", 0, 0)
            .trans(0, "b", 0, 0)
            .trans(0, "a", 1, 1)
            .trans(1, "a", 1, 1)
            .trans(1, "b", 0, 0)
            .build()
            .unwrap();
        let d = determinize_liminf(&a).unwrap();
        assert!(d.is_deterministic().unwrap());
        for (p, c) in [("b", "a"), ("", "a b"), ("a b a", "a"), ("", "b")] {
            let w = LassoWord::from_strs(p, c).unwrap();
            assert_eq!(eval_lasso(&d, &w).unwrap().value, eval_lasso(&a, &w).unwrap().value);
        }
    }

    #[test]
    fn last_subset_construction() {
        let a = WeightedAutomaton::builder("l", &["a", "b"], ValueFunction::Last)
            .states(2)
            .trans(0, "a", 0, 0)
            .trans(0, "a", 1, 2)
            .trans(0, "b", 0, 1)
            .trans(1, "a", 1, 5)
            .trans(1, "b", 0, 3)
            .build()
            .unwrap();
        let d = determinize_last(&a, &Limits::default()).unwrap();
        assert!(d.is_deterministic().unwrap());
        for w in ["a", "b", "a b", "a a", "b a b", "a b a a"] {
            let fw = FiniteWord::from_str_tokens(w).unwrap();
            assert_eq!(eval_finite(&d, &fw).unwrap().value, eval_finite(&a, &fw).unwrap().value);
        }
    }
}
