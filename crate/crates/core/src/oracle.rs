//! Brute-force reference evaluator.
//!
//! Enumerates simple cycles and simple stems of the automaton × word graph
//! and applies the value function to every resulting lasso run. Discounted
//! values are additionally pinned by depth-n truncation with tail bounds.
//! Shares no code with [`crate::eval`] beyond the value functions.

use std::collections::BTreeSet;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::{discounted_prefix, ValueFunction};
use crate::word::LassoWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Maximum number of product nodes.
    pub max_nodes: usize,
    /// Maximum number of enumerated simple cycles plus stems.
    pub max_enumerated: usize,
    /// Maximum truncation depth for discounted values.
    pub max_depth: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_nodes: 64,
            max_enumerated: 200_000,
            max_depth: 64,
        }
    }
}

struct Arc {
    to: usize,
    weight: Rational,
}

pub fn oracle_eval(aut: &WeightedAutomaton, word: &LassoWord) -> Result<Rational> {
    oracle_eval_with(aut, word, &OracleConfig::default())
}

pub fn oracle_eval_with(aut: &WeightedAutomaton, word: &LassoWord, config: &OracleConfig) -> Result<Rational> {
    if aut.tag().is_finite_word() {
        return Err(Error::WrongSemantics {
            operation: "oracle evaluation",
            expected: "an infinite-word value function",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    let symbols = word.indices_in(aut)?;
    let len = symbols.len();
    let prefix = word.prefix().len();

    // explore reachable (state, position) pairs, numbering them on discovery
    let mut ids = std::collections::HashMap::new();
    let mut nodes: Vec<(usize, usize)> = vec![(aut.initial(), 0)];
    ids.insert((aut.initial(), 0), 0usize);
    let mut adj: Vec<Vec<Arc>> = Vec::new();
    let mut k = 0;
    while k < nodes.len() {
        let (q, i) = nodes[k];
        let next = if i + 1 < len { i + 1 } else { prefix };
        let mut arcs = Vec::new();
        for t in aut.outgoing(q).iter().filter(|t| t.symbol == symbols[i]) {
            let key = (t.dst, next);
            let id = *ids.entry(key).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            });
            arcs.push(Arc {
                to: id,
                weight: t.weight.clone(),
            });
        }
        adj.push(arcs);
        k += 1;
        if nodes.len() > config.max_nodes {
            return Err(Error::CapExceeded {
                what: "oracle product nodes",
                size: nodes.len(),
                limit: config.max_nodes,
            });
        }
    }

    let cycles = simple_cycles(&adj, config.max_enumerated)?;
    let valuefn = aut.valuefn();
    match valuefn {
        ValueFunction::LimSup | ValueFunction::LimInf | ValueFunction::LimAvg => Ok(cycles
            .iter()
            .map(|c| {
                let ws: Vec<Rational> = c.iter().map(|(_, _, w)| w.clone()).collect();
                valuefn.value_of_lasso(&[], &ws).expect("nonempty cycle")
            })
            .max()
            .expect("every node reaches a cycle")),
        ValueFunction::Disc(lambda) => {
            // best cycle value entered at each node
            let mut best_cycle: Vec<Option<Rational>> = vec![None; adj.len()];
            for c in &cycles {
                for rot in 0..c.len() {
                    let ws: Vec<Rational> = (0..c.len()).map(|j| c[(rot + j) % c.len()].2.clone()).collect();
                    let v = valuefn.value_of_lasso(&[], &ws).expect("nonempty cycle");
                    let slot = &mut best_cycle[c[rot].0];
                    if slot.as_ref().is_none_or(|b| v > *b) {
                        *slot = Some(v);
                    }
                }
            }
            let candidates = disc_stem_values(
                &adj,
                lambda,
                &best_cycle,
                config.max_enumerated.saturating_sub(cycles.len()),
            )?;
            pin_discounted(&adj, lambda, &candidates, config)
        }
        ValueFunction::Sup => {
            let mut through: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); adj.len()];
            for c in &cycles {
                for rot in 0..c.len() {
                    let ws: Vec<Rational> = (0..c.len()).map(|j| c[(rot + j) % c.len()].2.clone()).collect();
                    through[c[rot].0].push(ws);
                }
            }
            let stems = simple_stems(&adj, config.max_enumerated.saturating_sub(cycles.len()))?;
            let mut candidates: BTreeSet<Rational> = BTreeSet::new();
            for (end, stem) in &stems {
                for cyc in &through[*end] {
                    candidates.insert(valuefn.value_of_lasso(stem, cyc).expect("nonempty cycle"));
                }
            }
            Ok(candidates.into_iter().next_back().expect("a lasso run exists"))
        }
        _ => unreachable!("finite-word tags rejected above"),
    }
}

/// Simple cycles as `(from, to, weight)` arcs, each listed once, rooted at
/// its smallest node.
fn simple_cycles(adj: &[Vec<Arc>], cap: usize) -> Result<Vec<Vec<(usize, usize, Rational)>>> {
    let mut out = Vec::new();
    let n = adj.len();
    let mut on_path = vec![false; n];
    let mut path: Vec<(usize, usize, Rational)> = Vec::new();
    for root in 0..n {
        on_path[root] = true;
        // explicit stack of (node, next arc index)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            if *pos == adj[v].len() {
                stack.pop();
                if let Some((from, _, _)) = path.pop() {
                    on_path[v] = false;
                    debug_assert_eq!(stack.last().map(|s| s.0), Some(from));
                }
                continue;
            }
            let arc = &adj[v][*pos];
            *pos += 1;
            if arc.to == root {
                let mut cycle = path.clone();
                cycle.push((v, root, arc.weight.clone()));
                out.push(cycle);
                if out.len() > cap {
                    return Err(Error::CapExceeded {
                        what: "oracle simple cycles",
                        size: out.len(),
                        limit: cap,
                    });
                }
            } else if arc.to > root && !on_path[arc.to] {
                on_path[arc.to] = true;
                path.push((v, arc.to, arc.weight.clone()));
                stack.push((arc.to, 0));
            }
        }
        on_path[root] = false;
    }
    Ok(out)
}

/// All node-simple paths from node 0, as `(end node, weights)`.
fn simple_stems(adj: &[Vec<Arc>], cap: usize) -> Result<Vec<(usize, Vec<Rational>)>> {
    let mut out = vec![(0usize, Vec::new())];
    let mut on_path = vec![false; adj.len()];
    on_path[0] = true;
    let mut weights: Vec<Rational> = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
        if *pos == adj[v].len() {
            stack.pop();
            if !stack.is_empty() {
                on_path[v] = false;
                weights.pop();
            }
            continue;
        }
        let arc = &adj[v][*pos];
        *pos += 1;
        if !on_path[arc.to] {
            on_path[arc.to] = true;
            weights.push(arc.weight.clone());
            out.push((arc.to, weights.clone()));
            if out.len() > cap {
                return Err(Error::CapExceeded {
                    what: "oracle stems",
                    size: out.len(),
                    limit: cap,
                });
            }
            stack.push((arc.to, 0));
        }
    }
    Ok(out)
}

/// `disc(stem) + λ^|stem| · best_cycle[end]` for every node-simple path
/// from node 0, accumulated along a depth-first walk.
fn disc_stem_values(
    adj: &[Vec<Arc>],
    lambda: &Rational,
    best_cycle: &[Option<Rational>],
    cap: usize,
) -> Result<BTreeSet<Rational>> {
    let mut out = BTreeSet::new();
    let mut seen = 0usize;
    let mut on_path = vec![false; adj.len()];
    on_path[0] = true;
    // (node, next arc, discounted prefix, λ^depth)
    let mut stack: Vec<(usize, usize, Rational, Rational)> = vec![(0, 0, Rational::zero(), Rational::one())];
    if let Some(c) = &best_cycle[0] {
        out.insert(c.clone());
    }
    while let Some(top) = stack.last_mut() {
        let (v, pos) = (top.0, top.1);
        if pos == adj[v].len() {
            stack.pop();
            if !stack.is_empty() {
                on_path[v] = false;
            }
            continue;
        }
        top.1 += 1;
        let arc = &adj[v][pos];
        if on_path[arc.to] {
            continue;
        }
        let value = &top.2 + &(&top.3 * &arc.weight);
        let factor = &top.3 * lambda;
        if let Some(c) = &best_cycle[arc.to] {
            out.insert(&value + &(&factor * c));
        }
        seen += 1;
        if seen > cap {
            return Err(Error::CapExceeded {
                what: "oracle stems",
                size: seen,
                limit: cap,
            });
        }
        on_path[arc.to] = true;
        stack.push((arc.to, 0, value, factor));
    }
    Ok(out)
}

/// The largest candidate lasso value, cross-checked against optimal
/// depth-n truncations: every truncation interval `± V·λⁿ/(1−λ)` must
/// contain it. Deepening stops once the interval isolates it or after
/// `config.max_depth` steps.
fn pin_discounted(
    adj: &[Vec<Arc>],
    lambda: &Rational,
    candidates: &BTreeSet<Rational>,
    config: &OracleConfig,
) -> Result<Rational> {
    let top = candidates.iter().next_back().expect("a lasso run exists").clone();
    let big_v = adj
        .iter()
        .flatten()
        .map(|a| a.weight.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let one_minus = Rational::one() - lambda;
    // best[x]: maximum over length-n runs from x of the discounted prefix
    let mut best = vec![Rational::zero(); adj.len()];
    let mut lambda_n = Rational::one();
    for _depth in 1..=config.max_depth {
        best = (0..adj.len())
            .map(|x| {
                adj[x]
                    .iter()
                    .map(|a| &a.weight + &(lambda * &best[a.to]))
                    .max()
                    .expect("total automaton")
            })
            .collect();
        lambda_n = &lambda_n * lambda;
        let tail = &big_v * &lambda_n / &one_minus;
        let lo = &best[0] - &tail;
        let hi = &best[0] + &tail;
        if top < lo || top > hi {
            return Err(Error::Precondition(format!(
                "oracle inconsistency: best lasso value {top} outside the truncation interval [{lo}, {hi}]"
            )));
        }
        let mut inside = candidates.range(lo..=hi);
        if let (Some(_), None) = (inside.next(), inside.next()) {
            break;
        }
    }
    Ok(top)
}

/// Depth-n truncation of a lasso run's discounted value, for tail-bound checks.
pub fn discounted_truncation(lambda: &Rational, stem: &[Rational], cycle: &[Rational], n: usize) -> Rational {
    let seq: Vec<Rational> = stem.iter().chain(cycle.iter().cycle()).take(n).cloned().collect();
    discounted_prefix(lambda, &seq)
}

/// `V·λⁿ/(1−λ)`.
pub fn tail_bound(max_abs_weight: &Rational, lambda: &Rational, n: usize) -> Rational {
    max_abs_weight * &lambda.pow(n) / (Rational::one() - lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_lasso;
    use crate::valuefn::discounted_lasso;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn gap_witness_agrees() {
        let a = WeightedAutomaton::builder("gap", &["a", "b"], ValueFunction::Disc(r("2/3")))
            .trans(0, "a", 0, "5/6")
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        let w = LassoWord::from_strs("", "a").unwrap();
        assert_eq!(oracle_eval(&a, &w).unwrap(), r("5/2"));
        assert_eq!(eval_lasso(&a, &w).unwrap().value, r("5/2"));
    }

    #[test]
    fn counter_half() {
        let a = WeightedAutomaton::builder("c", &["a", "b"], ValueFunction::LimAvg)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        let w = LassoWord::from_strs("", "a b").unwrap();
        assert_eq!(oracle_eval(&a, &w).unwrap(), r("1/2"));
    }

    #[test]
    fn cap_is_enforced() {
        let a = WeightedAutomaton::builder("c", &["a"], ValueFunction::LimAvg)
            .states(3)
            .trans(0, "a", 1, 1)
            .trans(1, "a", 2, 0)
            .trans(2, "a", 0, 0)
            .build()
            .unwrap();
        let w = LassoWord::from_strs("a a", "a a").unwrap();
        let tiny = OracleConfig {
            max_nodes: 2,
            ..OracleConfig::default()
        };
        assert!(matches!(
            oracle_eval_with(&a, &w, &tiny),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn truncation_respects_tail_bound() {
        let l = r("1/2");
        let stem = vec![r("1"), r("-1")];
        let cycle = vec![r("1/3"), r("1")];
        let full = discounted_lasso(&l, &stem, &cycle);
        for n in 0..20 {
            let t = discounted_truncation(&l, &stem, &cycle, n);
            assert!((full.clone() - t).abs() <= tail_bound(&r("1"), &l, n));
        }
    }
}
