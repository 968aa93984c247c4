//! Cut-point languages `L^{≥η}`: membership, isolation for deterministic
//! LimAvg automata, and extraction of Büchi automata.

use std::collections::HashMap;

use crate::automaton::{Transition, WeightedAutomaton};
use crate::closure::{BuchiAutomaton, Limits};
use crate::error::{Error, Result};
use crate::eval::eval_lasso;
use crate::graph::{scc_cycle_mean, Digraph};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};
use crate::word::LassoWord;

/// Threshold `η` with an optional isolation margin `ε > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPoint {
    pub eta: Rational,
    pub epsilon: Option<Rational>,
}

impl CutPoint {
    pub fn new(eta: Rational, epsilon: Option<Rational>) -> Result<Self> {
        if let Some(e) = &epsilon {
            if !e.is_positive() {
                return Err(Error::precondition(format!("isolation margin {e} must be positive")));
            }
        }
        Ok(CutPoint { eta, epsilon })
    }
}

/// Cycle means `[m, M]` of one SCC that contains a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccInterval {
    pub scc: usize,
    pub states: Vec<usize>,
    pub m: Rational,
    pub big_m: Rational,
    pub reachable: bool,
}

impl SccInterval {
    pub fn contains(&self, v: &Rational) -> bool {
        self.m <= *v && *v <= self.big_m
    }

    /// Distance from `v` to the interval (0 inside).
    pub fn distance(&self, v: &Rational) -> Rational {
        if *v < self.m {
            &self.m - v
        } else if *v > self.big_m {
            v - &self.big_m
        } else {
            Rational::zero()
        }
    }
}

/// `L_A(w) ≥ η`.
pub fn cutpoint_member(aut: &WeightedAutomaton, word: &LassoWord, eta: &Rational) -> Result<bool> {
    Ok(eval_lasso(aut, word)?.value >= *eta)
}

fn require_det_limavg(aut: &WeightedAutomaton, operation: &'static str) -> Result<()> {
    if aut.tag() != Tag::LimAvg {
        return Err(Error::WrongSemantics {
            operation,
            expected: "LimAvg",
            found: aut.valuefn().to_string(),
        });
    }
    if !aut.is_deterministic()? {
        return Err(Error::precondition(format!(
            "{operation} needs a deterministic automaton"
        )));
    }
    Ok(())
}

/// One interval per SCC of the state graph that contains a cycle, ordered
/// by smallest member state. Bounds come from Karp's algorithm on the SCC.
pub fn limavg_scc_intervals(aut: &WeightedAutomaton) -> Result<Vec<SccInterval>> {
    require_det_limavg(aut, "SCC interval analysis")?;
    let mut g = Digraph::new(aut.num_states());
    for t in aut.transitions() {
        g.add_edge(t.src, t.dst, t.weight.clone());
    }
    let sccs = g.sccs();
    let reachable = aut.reachable_states();
    let mut comps: Vec<usize> = (0..sccs.members.len()).filter(|&c| sccs.nontrivial[c]).collect();
    comps.sort_by_key(|&c| sccs.members[c][0]);
    Ok(comps
        .into_iter()
        .enumerate()
        .map(|(id, c)| {
            let nodes = &sccs.members[c];
            SccInterval {
                scc: id,
                states: nodes.clone(),
                m: scc_cycle_mean(&g, nodes, &sccs.component, false).mean,
                big_m: scc_cycle_mean(&g, nodes, &sccs.component, true).mean,
                reachable: reachable[nodes[0]],
            }
        })
        .collect())
}

/// Outcome of [`limavg_isolation_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isolation {
    pub isolated: bool,
    /// Distance from `η` to the nearest reachable interval, when isolated.
    pub margin: Option<Rational>,
    /// A reachable interval containing `η`, when not isolated.
    pub blocking: Option<SccInterval>,
}

/// `η` is isolated iff it lies outside every reachable SCC interval.
/// Unreachable SCCs never influence a run and are ignored.
pub fn limavg_isolation_check(aut: &WeightedAutomaton, eta: &Rational) -> Result<Isolation> {
    let intervals = limavg_scc_intervals(aut)?;
    let reachable: Vec<&SccInterval> = intervals.iter().filter(|i| i.reachable).collect();
    if let Some(hit) = reachable.iter().find(|i| i.contains(eta)) {
        return Ok(Isolation {
            isolated: false,
            margin: None,
            blocking: Some((*hit).clone()),
        });
    }
    let margin = reachable.iter().map(|i| i.distance(eta)).min();
    Ok(Isolation {
        isolated: true,
        margin,
        blocking: None,
    })
}

/// Deterministic Büchi automaton for `L^{≥η}` of a deterministic LimAvg
/// automaton with isolated `η`: every transition leaving a state of an SCC
/// with `m > η` is accepting.
pub fn extract_dbw_limavg(aut: &WeightedAutomaton, eta: &Rational) -> Result<BuchiAutomaton> {
    let intervals = limavg_scc_intervals(aut)?;
    if let Some(hit) = intervals.iter().find(|i| i.reachable && i.contains(eta)) {
        return Err(Error::NotIsolated {
            eta: eta.clone(),
            low: hit.m.clone(),
            high: hit.big_m.clone(),
        });
    }
    let mut accepting = vec![false; aut.num_states()];
    for i in intervals.iter().filter(|i| i.m > *eta) {
        for &q in &i.states {
            accepting[q] = true;
        }
    }
    let out = aut
        .with_valuefn(ValueFunction::LimSup)
        .map_weights(|t| {
            if accepting[t.src] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .with_name(format!("{}_cut", aut.name()));
    BuchiAutomaton::new(out)
}

/// Result of [`extract_nbw_disc`].
#[derive(Debug, Clone)]
pub struct DiscExtraction {
    pub buchi: BuchiAutomaton,
    /// Unfolding depth `n`, the least with `u_n < ε`.
    pub depth: usize,
    /// `u_n = V·λⁿ/(1−λ)`.
    pub tail: Rational,
}

/// `V·λⁿ/(1−λ)`.
pub fn disc_tail(max_abs_weight: &Rational, lambda: &Rational, n: usize) -> Rational {
    max_abs_weight * &lambda.pow(n) / (Rational::one() - lambda)
}

pub fn extract_nbw_disc(aut: &WeightedAutomaton, eta: &Rational, epsilon: &Rational) -> Result<DiscExtraction> {
    extract_nbw_disc_with(aut, eta, epsilon, &Limits::default())
}

/// Büchi automaton for `L^{≥η}` of a Disc automaton, given a claimed
/// isolation margin `ε`.
///
/// Unfolds `A` to depth `n`, merging paths that agree on state and exact
/// partial sum. A depth-`n` path with partial value at least `η + ε − u_n`
/// moves to an accepting sink, one at most `η − ε + u_n` to a rejecting
/// sink; anything in between refutes the margin.
pub fn extract_nbw_disc_with(
    aut: &WeightedAutomaton,
    eta: &Rational,
    epsilon: &Rational,
    limits: &Limits,
) -> Result<DiscExtraction> {
    let ValueFunction::Disc(lambda) = aut.valuefn().clone() else {
        return Err(Error::WrongSemantics {
            operation: "Disc cut-point extraction",
            expected: "Disc",
            found: aut.valuefn().to_string(),
        });
    };
    aut.ensure_valid()?;
    let cut = CutPoint::new(eta.clone(), Some(epsilon.clone()))?;
    let epsilon = cut.epsilon.as_ref().expect("set above");
    let big_v = aut
        .transitions()
        .iter()
        .map(|t| t.weight.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let mut depth = 0;
    while disc_tail(&big_v, &lambda, depth) >= *epsilon {
        depth += 1;
    }
    let tail = disc_tail(&big_v, &lambda, depth);
    let accept_from = eta + epsilon - &tail;
    let reject_to = eta - epsilon + &tail;
    let classify = |value: &Rational, path: &dyn Fn() -> Vec<String>| -> Result<bool> {
        if *value >= accept_from {
            Ok(true)
        } else if *value <= reject_to {
            Ok(false)
        } else {
            Err(Error::IsolationViolated {
                path: path(),
                value: value.clone(),
                low: reject_to.clone(),
                high: accept_from.clone(),
            })
        }
    };

    let k = aut.alphabet().len();
    let name = format!("{}_cut", aut.name());
    let sink = |accepting: bool| {
        let w = if accepting { Rational::one() } else { Rational::zero() };
        let ts = (0..k)
            .map(|s| Transition {
                src: 0,
                symbol: s,
                dst: 0,
                weight: w.clone(),
            })
            .collect();
        WeightedAutomaton::new(name.clone(), aut.alphabet().to_vec(), 1, 0, ValueFunction::LimSup, ts)
    };
    if depth == 0 {
        let accepting = classify(&Rational::zero(), &Vec::new)?;
        return Ok(DiscExtraction {
            buchi: BuchiAutomaton::new(sink(accepting)?)?,
            depth,
            tail,
        });
    }

    // node = (depth d < n, state, Σ_{i<d} λ^i w_i); parent links recover a path
    let mut ids: HashMap<(usize, usize, Rational), usize> = HashMap::new();
    let mut nodes: Vec<(usize, usize, Rational)> = vec![(0, aut.initial(), Rational::zero())];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    ids.insert(nodes[0].clone(), 0);
    // targets: Ok(node) or Err(accepting)
    let mut edges: Vec<(usize, usize, std::result::Result<usize, bool>)> = Vec::new();
    let path_to = |parent: &[Option<(usize, usize)>], mut v: usize, last: usize| -> Vec<String> {
        let mut syms = vec![aut.alphabet()[last].clone()];
        while let Some((p, s)) = parent[v] {
            syms.push(aut.alphabet()[s].clone());
            v = p;
        }
        syms.reverse();
        syms
    };
    let mut next = 0;
    while next < nodes.len() {
        let (d, q, sum) = nodes[next].clone();
        let factor = lambda.pow(d);
        for t in aut.outgoing(q) {
            let value = &sum + &(&factor * &t.weight);
            if d + 1 == depth {
                let accepting = classify(&value, &|| path_to(&parent, next, t.symbol))?;
                edges.push((next, t.symbol, Err(accepting)));
            } else {
                let key = (d + 1, t.dst, value);
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        if nodes.len() + 2 >= limits.max_states {
                            return Err(Error::CapExceeded {
                                what: "Disc unfolding states",
                                size: nodes.len() + 3,
                                limit: limits.max_states,
                            });
                        }
                        ids.insert(key.clone(), nodes.len());
                        nodes.push(key);
                        parent.push(Some((next, t.symbol)));
                        nodes.len() - 1
                    }
                };
                edges.push((next, t.symbol, Ok(id)));
            }
        }
        next += 1;
    }
    let accept = nodes.len();
    let reject = accept + 1;
    let mut ts: Vec<Transition> = edges
        .into_iter()
        .map(|(src, symbol, target)| Transition {
            src,
            symbol,
            dst: match target {
                Ok(id) => id,
                Err(true) => accept,
                Err(false) => reject,
            },
            weight: Rational::zero(),
        })
        .collect();
    for s in 0..k {
        ts.push(Transition {
            src: accept,
            symbol: s,
            dst: accept,
            weight: Rational::one(),
        });
        ts.push(Transition {
            src: reject,
            symbol: s,
            dst: reject,
            weight: Rational::zero(),
        });
    }
    let out = WeightedAutomaton::new(
        name,
        aut.alphabet().to_vec(),
        nodes.len() + 2,
        0,
        ValueFunction::LimSup,
        ts,
    )?;
    Ok(DiscExtraction {
        buchi: BuchiAutomaton::new(out)?,
        depth,
        tail,
    })
}

/// Checks that every run value of a Disc automaton lies strictly outside
/// `[η − ε, η + ε]`, which makes `ε` an isolation margin for `η`.
///
/// Paths are unfolded up to `max_depth`; a path of depth `m` and partial
/// value `p` is settled once `[p − u_m, p + u_m]` avoids the closed
/// interval. `false` means no certificate was found within the depth or
/// the frontier cap, not that the margin is invalid.
pub fn certify_disc_margin(
    aut: &WeightedAutomaton,
    eta: &Rational,
    epsilon: &Rational,
    max_depth: usize,
) -> Result<bool> {
    const FRONTIER_CAP: usize = 20_000;
    let ValueFunction::Disc(lambda) = aut.valuefn().clone() else {
        return Err(Error::WrongSemantics {
            operation: "Disc margin certification",
            expected: "Disc",
            found: aut.valuefn().to_string(),
        });
    };
    aut.ensure_valid()?;
    let big_v = aut
        .transitions()
        .iter()
        .map(|t| t.weight.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let low = eta - epsilon;
    let high = eta + epsilon;
    let mut frontier: std::collections::HashSet<(usize, Rational)> = [(aut.initial(), Rational::zero())].into();
    let mut factor = Rational::one();
    for m in 0..=max_depth {
        let u = disc_tail(&big_v, &lambda, m);
        frontier.retain(|(_, p)| !(p + &u < low || p - &u > high));
        if frontier.is_empty() {
            return Ok(true);
        }
        if m == max_depth || frontier.len() > FRONTIER_CAP {
            return Ok(false);
        }
        let mut next = std::collections::HashSet::new();
        for (q, p) in &frontier {
            for t in aut.outgoing(*q) {
                next.insert((t.dst, p + &(&factor * &t.weight)));
            }
        }
        frontier = next;
        factor = &factor * &lambda;
    }
    Ok(false)
}
