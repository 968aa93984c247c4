//! Product and union constructions.

use std::collections::HashMap;
use std::hash::Hash;

use crate::automaton::{Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::ValueFunction;

/// Builds the automaton reachable from `init` under `succ`, numbering states
/// in breadth-first discovery order. `succ(k, σ)` lists `(target, weight)`.
pub(crate) fn explore<K, F>(
    alphabet: &[String],
    valuefn: &ValueFunction,
    init: K,
    cap: usize,
    mut succ: F,
) -> Result<WeightedAutomaton>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K, usize) -> Vec<(K, Rational)>,
{
    let mut ids: HashMap<K, usize> = HashMap::new();
    let mut keys: Vec<K> = vec![init.clone()];
    ids.insert(init, 0);
    let mut transitions = Vec::new();
    let mut next = 0;
    while next < keys.len() {
        let key = keys[next].clone();
        for sym in 0..alphabet.len() {
            for (target, weight) in succ(&key, sym) {
                let dst = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = keys.len();
                        if id >= cap {
                            return Err(Error::CapExceeded {
                                what: "constructed states",
                                size: id + 1,
                                limit: cap,
                            });
                        }
                        ids.insert(target.clone(), id);
                        keys.push(target);
                        id
                    }
                };
                transitions.push(Transition {
                    src: next,
                    symbol: sym,
                    dst,
                    weight,
                });
            }
        }
        next += 1;
    }
    WeightedAutomaton::new(
        "product",
        alphabet.to_vec(),
        keys.len(),
        0,
        valuefn.clone(),
        transitions,
    )
}

/// Fresh initial state copying the outgoing transitions of both initial
/// states, followed by disjoint copies of `a` and `b`.
pub(crate) fn union(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    let off_a = 1;
    let off_b = 1 + a.num_states();
    let mut ts = Vec::with_capacity(a.transitions().len() + b.transitions().len());
    for (aut, off) in [(a, off_a), (b, off_b)] {
        for t in aut.transitions() {
            ts.push(Transition {
                src: t.src + off,
                dst: t.dst + off,
                ..t.clone()
            });
        }
        for t in aut.outgoing(aut.initial()) {
            ts.push(Transition {
                src: 0,
                dst: t.dst + off,
                ..t.clone()
            });
        }
    }
    WeightedAutomaton::new(
        "union",
        a.alphabet().to_vec(),
        1 + a.num_states() + b.num_states(),
        0,
        a.valuefn().clone(),
        ts,
    )
}

/// Synchronized product with joint weight `combine(w1, w2)`.
pub(crate) fn synchronized(
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    cap: usize,
    combine: impl Fn(&Rational, &Rational) -> Rational,
) -> Result<WeightedAutomaton> {
    explore(
        a.alphabet(),
        a.valuefn(),
        (a.initial(), b.initial()),
        cap,
        |&(p, q), s| {
            let mut out = Vec::new();
            for t1 in a.successors(p, s) {
                for t2 in b.successors(q, s) {
                    out.push(((t1.dst, t2.dst), combine(&t1.weight, &t2.weight)));
                }
            }
            out
        },
    )
}

/// States `(q1, v1, q2, v2)` remembering the largest weight seen by each
/// component; joint weight `combine(v1', v2')`.
pub(crate) fn running_max(
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    cap: usize,
    combine: impl Fn(&Rational, &Rational) -> Rational,
) -> Result<WeightedAutomaton> {
    let v1 = a.weight_set();
    let v2 = b.weight_set();
    let init = (a.initial(), v1[0].clone(), b.initial(), v2[0].clone());
    explore(a.alphabet(), a.valuefn(), init, cap, |(p, m1, q, m2), s| {
        let mut out = Vec::new();
        for t1 in a.successors(*p, s) {
            for t2 in b.successors(*q, s) {
                let n1 = m1.clone().max_of(t1.weight.clone());
                let n2 = m2.clone().max_of(t2.weight.clone());
                let w = combine(&n1, &n2);
                out.push(((t1.dst, n1, t2.dst, n2), w));
            }
        }
        out
    })
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Guessed<T> {
    Start,
    In(usize, usize, u8, T),
}

/// Nondeterministic LimSup min: guess the value `v`, then alternate between
/// waiting for `A_1` and `A_2` to reach a weight `≥ v`. Toggles carry `v`,
/// other transitions the least weight; initial transitions carry 0.
pub(crate) fn nlsup_min(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize) -> Result<WeightedAutomaton> {
    let mut all = a.weight_set();
    all.extend(b.weight_set());
    all.sort();
    all.dedup();
    let vmin = all[0].clone();
    explore(a.alphabet(), a.valuefn(), Guessed::Start, cap, |k, s| {
        let mut out = Vec::new();
        match k {
            Guessed::Start => {
                for vi in 0..all.len() {
                    for t1 in a.successors(a.initial(), s) {
                        for t2 in b.successors(b.initial(), s) {
                            out.push((Guessed::In(t1.dst, t2.dst, 1, vi), Rational::zero()));
                        }
                    }
                }
            }
            Guessed::In(p, q, j, vi) => {
                let v = &all[*vi];
                for t1 in a.successors(*p, s) {
                    for t2 in b.successors(*q, s) {
                        let seen = if *j == 1 { &t1.weight } else { &t2.weight };
                        let (j2, w) = if seen >= v {
                            (3 - *j, v.clone())
                        } else {
                            (*j, vmin.clone())
                        };
                        out.push((Guessed::In(t1.dst, t2.dst, j2, *vi), w));
                    }
                }
            }
        }
        out
    })
}

/// Nondeterministic LimSup sum: guess `(v1, v2)`, then alternate between
/// waiting for `A_1` to take a `v1` transition and `A_2` a `v2` transition.
/// Fulfilments carry `v1 + v2`, everything else the least pair sum.
pub(crate) fn nlsup_sum(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize) -> Result<WeightedAutomaton> {
    let v1 = a.weight_set();
    let v2 = b.weight_set();
    let pairs: Vec<(Rational, Rational)> = v1
        .iter()
        .flat_map(|x| v2.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let vmin = &v1[0] + &v2[0];
    explore(a.alphabet(), a.valuefn(), Guessed::Start, cap, |k, s| {
        let mut out = Vec::new();
        match k {
            Guessed::Start => {
                for pi in 0..pairs.len() {
                    for t1 in a.successors(a.initial(), s) {
                        for t2 in b.successors(b.initial(), s) {
                            out.push((Guessed::In(t1.dst, t2.dst, 1, pi), vmin.clone()));
                        }
                    }
                }
            }
            Guessed::In(p, q, bit, pi) => {
                let (x, y) = &pairs[*pi];
                for t1 in a.successors(*p, s) {
                    for t2 in b.successors(*q, s) {
                        let hit = if *bit == 1 { t1.weight == *x } else { t2.weight == *y };
                        let (b2, w) = if hit { (3 - *bit, x + y) } else { (*bit, vmin.clone()) };
                        out.push((Guessed::In(t1.dst, t2.dst, b2, *pi), w));
                    }
                }
            }
        }
        out
    })
}

fn bit_budget(bits: usize) -> Result<()> {
    if bits > 64 {
        return Err(Error::CapExceeded {
            what: "bits per product state",
            size: bits,
            limit: 64,
        });
    }
    Ok(())
}

/// Deterministic LimSup min: one two-copy switcher per threshold `v_j`,
/// flipping when the watched component crosses a weight `≥ v_j`; the joint
/// weight is the largest flipped threshold (or the least weight).
pub(crate) fn dlsup_min(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize) -> Result<WeightedAutomaton> {
    let mut all = a.weight_set();
    all.extend(b.weight_set());
    all.sort();
    all.dedup();
    bit_budget(all.len())?;
    let vmin = all[0].clone();
    // bit j clear: watching A_1; set: watching A_2
    explore(
        a.alphabet(),
        a.valuefn(),
        (a.initial(), b.initial(), 0u64),
        cap,
        |&(p, q, bits), s| {
            let mut out = Vec::new();
            for t1 in a.successors(p, s) {
                for t2 in b.successors(q, s) {
                    let mut next = bits;
                    let mut w = vmin.clone();
                    for (j, v) in all.iter().enumerate() {
                        let watched = if bits >> j & 1 == 0 { &t1.weight } else { &t2.weight };
                        if watched >= v {
                            next ^= 1 << j;
                            w = v.clone();
                        }
                    }
                    out.push(((t1.dst, t2.dst, next), w));
                }
            }
            out
        },
    )
}

/// Deterministic LimSup sum: one bit per pair `(v1, v2)`, flipping when the
/// watched component takes a transition of exactly its weight; the joint
/// weight is the largest flipped pair sum (or the least pair sum).
pub(crate) fn dlsup_sum(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize) -> Result<WeightedAutomaton> {
    pair_bits(a, b, cap, PairRule::LimSup)
}

/// Deterministic LimInf sum. Same bit per pair `(v1, v2)` as the LimSup
/// construction; the joint weight is the *least* flipped pair sum, or the
/// largest pair sum when nothing flips. A pair flips infinitely often iff
/// both weights recur, so the liminf is `min Inf(γ1) + min Inf(γ2)`.
pub(crate) fn dliminf_sum(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize) -> Result<WeightedAutomaton> {
    pair_bits(a, b, cap, PairRule::LimInf)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PairRule {
    LimSup,
    LimInf,
}

fn pair_bits(a: &WeightedAutomaton, b: &WeightedAutomaton, cap: usize, rule: PairRule) -> Result<WeightedAutomaton> {
    let v1 = a.weight_set();
    let v2 = b.weight_set();
    bit_budget(v1.len() * v2.len())?;
    let pairs: Vec<(Rational, Rational, Rational)> = v1
        .iter()
        .flat_map(|x| v2.iter().map(move |y| (x.clone(), y.clone(), x + y)))
        .collect();
    let default = match rule {
        PairRule::LimSup => pairs.iter().map(|p| &p.2).min(),
        PairRule::LimInf => pairs.iter().map(|p| &p.2).max(),
    }
    .expect("nonempty weight sets")
    .clone();
    explore(
        a.alphabet(),
        a.valuefn(),
        (a.initial(), b.initial(), 0u64),
        cap,
        |&(p, q, bits), s| {
            let mut out = Vec::new();
            for t1 in a.successors(p, s) {
                for t2 in b.successors(q, s) {
                    let mut next = bits;
                    let mut w: Option<&Rational> = None;
                    for (j, (x, y, sum)) in pairs.iter().enumerate() {
                        let hit = if bits >> j & 1 == 0 {
                            t1.weight == *x
                        } else {
                            t2.weight == *y
                        };
                        if hit {
                            next ^= 1 << j;
                            w = Some(match (rule, w) {
                                (_, None) => sum,
                                (PairRule::LimSup, Some(c)) => c.max(sum),
                                (PairRule::LimInf, Some(c)) => c.min(sum),
                            });
                        }
                    }
                    let weight = match (rule, w) {
                        (_, None) => default.clone(),
                        (PairRule::LimSup, Some(c)) => c.clone().max_of(default.clone()),
                        (PairRule::LimInf, Some(c)) => c.clone().min_of(default.clone()),
                    };
                    out.push(((t1.dst, t2.dst, next), weight));
                }
            }
            out
        },
    )
}
