//! Exact evaluation of `L_A(w) = sup { Val(γ(r)) | r run of A over w }`.
//!
//! Infinite words are evaluated on the product of the automaton with the
//! positions of a lasso word; finite words by backward dynamic programming.

use std::fmt;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::graph::{self, Digraph};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};
use crate::word::{FiniteWord, LassoWord, Word};

/// Automaton × word-position graph. Node `(q, i)` has id `q * len + i`.
#[derive(Debug, Clone)]
pub struct ProductGraph {
    graph: Digraph,
    positions: usize,
    initial: usize,
    // automaton transition index behind each graph edge
    transition_of: Vec<usize>,
}

impl ProductGraph {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn initial_node(&self) -> usize {
        self.initial
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    /// `(state, position)` of a node.
    pub fn node(&self, id: usize) -> (usize, usize) {
        (id / self.positions, id % self.positions)
    }

    pub fn node_id(&self, state: usize, position: usize) -> usize {
        state * self.positions + position
    }

    /// Index into the automaton's transitions for a graph edge.
    pub fn transition_of(&self, edge: usize) -> usize {
        self.transition_of[edge]
    }
}

pub fn build_product(aut: &WeightedAutomaton, word: &LassoWord) -> Result<ProductGraph> {
    let symbols = word.indices_in(aut)?;
    let len = word.len();
    let mut graph = Digraph::new(aut.num_states() * len);
    let mut transition_of = Vec::new();
    for q in 0..aut.num_states() {
        for (i, &sym) in symbols.iter().enumerate() {
            let next = word.next_position(i);
            for t in aut.successor_range(q, sym) {
                let tr = &aut.transitions()[t];
                graph.add_edge(q * len + i, tr.dst * len + next, tr.weight.clone());
                transition_of.push(t);
            }
        }
    }
    Ok(ProductGraph {
        graph,
        positions: len,
        initial: aut.initial() * len,
        transition_of,
    })
}

/// One step of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStep {
    pub from: usize,
    pub symbol: String,
    pub to: usize,
    pub weight: Rational,
}

/// A run given as `stem · cycle^ω`; finite runs have an empty cycle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub stem: Vec<RunStep>,
    pub cycle: Vec<RunStep>,
}

impl Witness {
    /// Applies `valuefn` to the run's weight sequence.
    pub fn replay(&self, valuefn: &ValueFunction) -> Option<Rational> {
        let stem: Vec<Rational> = self.stem.iter().map(|s| s.weight.clone()).collect();
        if self.cycle.is_empty() {
            valuefn.value_of_finite(&stem)
        } else {
            let cycle: Vec<Rational> = self.cycle.iter().map(|s| s.weight.clone()).collect();
            valuefn.value_of_lasso(&stem, &cycle)
        }
    }

    /// Checks that consecutive steps connect.
    pub fn is_connected(&self, initial: usize) -> bool {
        let mut at = initial;
        for s in self.stem.iter().chain(&self.cycle) {
            if s.from != at {
                return false;
            }
            at = s.to;
        }
        self.cycle.first().is_none_or(|c| c.from == at)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let step = |s: &RunStep| format!("{} -{}/{}-> {}", s.from, s.symbol, s.weight, s.to);
        let stem: Vec<String> = self.stem.iter().map(step).collect();
        write!(f, "{}", stem.join(", "))?;
        if !self.cycle.is_empty() {
            let cycle: Vec<String> = self.cycle.iter().map(step).collect();
            write!(f, " | ({})^w", cycle.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalResult {
    pub value: Rational,
    pub witness: Witness,
}

/// Evaluates either kind of word.
pub fn eval(aut: &WeightedAutomaton, word: &Word) -> Result<EvalResult> {
    match word {
        Word::Finite(w) => eval_finite(aut, w),
        Word::Lasso(w) => eval_lasso(aut, w),
    }
}

pub fn eval_lasso(aut: &WeightedAutomaton, word: &LassoWord) -> Result<EvalResult> {
    if aut.tag().is_finite_word() {
        return Err(Error::WrongSemantics {
            operation: "lasso evaluation",
            expected: "an infinite-word value function",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    let product = build_product(aut, word)?;
    let g = product.graph();
    let start = product.initial_node();
    let reach = g.reachable_from(start);

    let (value, stem, cycle) = match aut.valuefn() {
        ValueFunction::Sup => sup_witness(g, start, &reach),
        ValueFunction::LimSup => limsup_witness(g, start, &reach),
        ValueFunction::LimInf => liminf_witness(g, start, &reach),
        ValueFunction::LimAvg => limavg_witness(g, start, &reach),
        ValueFunction::Disc(lambda) => {
            let sol = graph::disc_policy_iteration(g, start, lambda)?;
            let (stem, cycle) = sol.lasso(g, start);
            (sol.value, stem, cycle)
        }
        _ => unreachable!("finite-word tags rejected above"),
    };
    let to_steps = |edges: &[usize]| -> Vec<RunStep> {
        edges
            .iter()
            .map(|&e| {
                let t = &aut.transitions()[product.transition_of(e)];
                RunStep {
                    from: t.src,
                    symbol: aut.alphabet()[t.symbol].clone(),
                    to: t.dst,
                    weight: t.weight.clone(),
                }
            })
            .collect()
    };
    let witness = Witness {
        stem: to_steps(&stem),
        cycle: to_steps(&cycle),
    };
    debug_assert_eq!(witness.replay(aut.valuefn()).as_ref(), Some(&value));
    Ok(EvalResult { value, witness })
}

type Lasso = (Rational, Vec<usize>, Vec<usize>);

fn path_to(g: &Digraph, start: usize, target: usize) -> Vec<usize> {
    g.bfs_path(start, |v| v == target, |_, _| true)
        .expect("target reachable")
}

/// Walks from `from` along first out-edges until a node repeats, returning
/// the edges before the repeat and the closing cycle.
fn run_until_repeat(g: &Digraph, from: usize) -> (Vec<usize>, Vec<usize>) {
    let mut seen_at = vec![usize::MAX; g.num_nodes()];
    let mut edges = Vec::new();
    let mut v = from;
    while seen_at[v] == usize::MAX {
        seen_at[v] = edges.len();
        let e = g.out_edges(v)[0];
        edges.push(e);
        v = g.edge(e).to;
    }
    let split = seen_at[v];
    let cycle = edges.split_off(split);
    (edges, cycle)
}

fn sup_witness(g: &Digraph, start: usize, reach: &[bool]) -> Lasso {
    let best = (0..g.num_edges())
        .filter(|&e| reach[g.edge(e).from])
        .max_by(|&a, &b| g.edge(a).weight.cmp(&g.edge(b).weight).then(b.cmp(&a)))
        .expect("total automaton has a reachable edge");
    let mut stem = path_to(g, start, g.edge(best).from);
    stem.push(best);
    let (tail, cycle) = run_until_repeat(g, g.edge(best).to);
    stem.extend(tail);
    (g.edge(best).weight.clone(), stem, cycle)
}

/// Cycle through edge `e` inside its SCC (edges accepted by `keep`).
fn cycle_through(g: &Digraph, e: usize, keep: impl Fn(usize, &graph::Edge) -> bool) -> Vec<usize> {
    let edge = g.edge(e);
    let mut cycle = vec![e];
    let back = g
        .bfs_path(edge.to, |v| v == edge.from, keep)
        .expect("edge lies on a cycle");
    cycle.extend(back);
    cycle
}

fn limsup_witness(g: &Digraph, start: usize, reach: &[bool]) -> Lasso {
    let sccs = g.sccs();
    let best = (0..g.num_edges())
        .filter(|&e| {
            let edge = g.edge(e);
            reach[edge.from] && sccs.component[edge.from] == sccs.component[edge.to]
        })
        .max_by(|&a, &b| g.edge(a).weight.cmp(&g.edge(b).weight).then(b.cmp(&a)))
        .expect("a reachable cycle exists");
    let comp = sccs.component[g.edge(best).from];
    let cycle = cycle_through(g, best, |_, x| {
        sccs.component[x.from] == comp && sccs.component[x.to] == comp
    });
    let stem = path_to(g, start, g.edge(best).from);
    (g.edge(best).weight.clone(), stem, cycle)
}

fn liminf_witness(g: &Digraph, start: usize, reach: &[bool]) -> Lasso {
    let mut weights: Vec<&Rational> = g.edges().iter().map(|e| &e.weight).collect();
    weights.sort();
    weights.dedup();
    for v in weights.into_iter().rev() {
        let keep = |_: usize, e: &graph::Edge| e.weight >= *v;
        let sccs = g.sccs_filtered(keep);
        let found = (0..g.num_edges()).find(|&e| {
            let edge = g.edge(e);
            edge.weight >= *v && reach[edge.from] && sccs.component[edge.from] == sccs.component[edge.to]
        });
        if let Some(e) = found {
            let comp = sccs.component[g.edge(e).from];
            let cycle = cycle_through(g, e, |_, x| {
                x.weight >= *v && sccs.component[x.from] == comp && sccs.component[x.to] == comp
            });
            let stem = path_to(g, start, g.edge(e).from);
            return (v.clone(), stem, cycle);
        }
    }
    unreachable!("a reachable cycle exists")
}

fn limavg_witness(g: &Digraph, start: usize, reach: &[bool]) -> Lasso {
    let sccs = g.sccs();
    let mut best: Option<graph::CycleMean> = None;
    for (c, nodes) in sccs.members.iter().enumerate() {
        if !sccs.nontrivial[c] || !reach[nodes[0]] {
            continue;
        }
        let found = graph::scc_cycle_mean(g, nodes, &sccs.component, true);
        if best.as_ref().is_none_or(|b| found.mean > b.mean) {
            best = Some(found);
        }
    }
    let best = best.expect("a reachable cycle exists");
    let stem = path_to(g, start, g.edge(best.cycle[0]).from);
    (best.mean, stem, best.cycle)
}

/// Backward dynamic program over the layered `(position, state)` DAG.
pub fn eval_finite(aut: &WeightedAutomaton, word: &FiniteWord) -> Result<EvalResult> {
    if !aut.tag().is_finite_word() {
        return Err(Error::WrongSemantics {
            operation: "finite-word evaluation",
            expected: "Last, Max or Sum",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    let symbols = word.indices_in(aut)?;
    let n = symbols.len();
    let states = aut.num_states();
    let tag = aut.tag();

    // best[i][q]: best value of the suffix read from position i in state q;
    // choice[i][q]: transition index achieving it
    let mut best: Vec<Vec<Option<Rational>>> = vec![vec![None; states]; n + 1];
    let mut choice: Vec<Vec<usize>> = vec![vec![usize::MAX; states]; n];
    for i in (0..n).rev() {
        for q in 0..states {
            for t in aut.successor_range(q, symbols[i]) {
                let tr = &aut.transitions()[t];
                let suffix = &best[i + 1][tr.dst];
                let cand = match (tag, suffix) {
                    (_, None) => tr.weight.clone(),
                    (Tag::Sum, Some(s)) => &tr.weight + s,
                    (Tag::Max, Some(s)) => tr.weight.clone().max_of(s.clone()),
                    (Tag::Last, Some(s)) => s.clone(),
                    _ => unreachable!(),
                };
                if best[i][q].as_ref().is_none_or(|b| cand > *b) {
                    best[i][q] = Some(cand);
                    choice[i][q] = t;
                }
            }
        }
    }
    let mut stem = Vec::with_capacity(n);
    let mut q = aut.initial();
    for row in &choice {
        let tr = &aut.transitions()[row[q]];
        stem.push(RunStep {
            from: tr.src,
            symbol: aut.alphabet()[tr.symbol].clone(),
            to: tr.dst,
            weight: tr.weight.clone(),
        });
        q = tr.dst;
    }
    let value = best[0][aut.initial()].clone().expect("total automaton");
    let witness = Witness {
        stem,
        cycle: Vec::new(),
    };
    debug_assert_eq!(witness.replay(aut.valuefn()).as_ref(), Some(&value));
    Ok(EvalResult { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::WeightedAutomaton;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn lasso(p: &str, c: &str) -> LassoWord {
        LassoWord::from_strs(p, c).unwrap()
    }

    fn counter(valuefn: ValueFunction) -> WeightedAutomaton {
        WeightedAutomaton::builder("count_a", &["a", "b"], valuefn)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap()
    }

    #[test]
    fn product_shape() {
        let a = counter(ValueFunction::LimAvg);
        let p = build_product(&a, &lasso("a", "b")).unwrap();
        assert_eq!(p.num_nodes(), 2);
        assert_eq!(p.num_edges(), 2);
        assert_eq!(p.node(p.initial_node()), (0, 0));
    }

    #[test]
    fn deterministic_product_has_out_degree_one() {
        let a = WeightedAutomaton::builder("flip", &["a", "b"], ValueFunction::LimSup)
            .states(2)
            .trans(0, "a", 1, 1)
            .trans(0, "b", 0, 0)
            .trans(1, "a", 0, 0)
            .trans(1, "b", 1, 1)
            .build()
            .unwrap();
        let p = build_product(&a, &lasso("", "a b")).unwrap();
        assert!(p.num_nodes() <= 4);
        for v in 0..p.num_nodes() {
            assert_eq!(p.graph().out_edges(v).len(), 1);
        }
    }

    #[test]
    fn limavg_counter_values() {
        let a = counter(ValueFunction::LimAvg);
        assert_eq!(eval_lasso(&a, &lasso("b a b", "a")).unwrap().value, r("1"));
        assert_eq!(eval_lasso(&a, &lasso("a a", "b")).unwrap().value, r("0"));
        assert_eq!(eval_lasso(&a, &lasso("", "a b")).unwrap().value, r("1/2"));
    }

    #[test]
    fn each_tag_on_a_fixed_word() {
        let build = |vf| {
            WeightedAutomaton::builder("t", &["a", "b"], vf)
                .states(2)
                .trans(0, "a", 1, 3)
                .trans(0, "b", 0, 0)
                .trans(1, "a", 1, 1)
                .trans(1, "b", 0, "1/2")
                .build()
                .unwrap()
        };
        let w = lasso("a", "b a");
        // run: 0 -a/3-> 1 -b/1/2-> 0 -a/3-> 1 ...
        let cases = [
            (ValueFunction::Sup, r("3")),
            (ValueFunction::LimSup, r("3")),
            (ValueFunction::LimInf, r("1/2")),
            (ValueFunction::LimAvg, r("7/4")),
        ];
        for (vf, expect) in cases {
            let res = eval_lasso(&build(vf.clone()), &w).unwrap();
            assert_eq!(res.value, expect, "{vf}");
            assert_eq!(res.witness.replay(&vf), Some(expect));
            assert!(res.witness.is_connected(0));
        }
    }

    #[test]
    fn nondeterministic_sup_over_runs() {
        let a = WeightedAutomaton::builder("guess", &["a"], ValueFunction::LimInf)
            .states(3)
            .trans(0, "a", 1, 0)
            .trans(0, "a", 2, 0)
            .trans(1, "a", 1, "1/3")
            .trans(2, "a", 2, "1/2")
            .build()
            .unwrap();
        assert_eq!(eval_lasso(&a, &lasso("", "a")).unwrap().value, r("1/2"));
    }

    #[test]
    fn sup_with_single_weight() {
        let a = WeightedAutomaton::builder("s", &["a"], ValueFunction::Sup)
            .trans(0, "a", 0, "1/2")
            .build()
            .unwrap();
        assert_eq!(eval_lasso(&a, &lasso("", "a")).unwrap().value, r("1/2"));
    }

    #[test]
    fn discounted_witness_values() {
        let l = r("2/3");
        let a = WeightedAutomaton::builder("gap", &["a", "b"], ValueFunction::Disc(l))
            .trans(0, "a", 0, "5/6")
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        assert_eq!(eval_lasso(&a, &lasso("", "a")).unwrap().value, r("5/2"));
        assert_eq!(eval_lasso(&a, &lasso("a", "b")).unwrap().value, r("5/6"));
    }

    #[test]
    fn finite_values_and_rejections() {
        let sum = counter(ValueFunction::Sum);
        let w = FiniteWord::from_str_tokens("a a b").unwrap();
        assert_eq!(eval_finite(&sum, &w).unwrap().value, r("2"));
        let max = WeightedAutomaton::builder("m", &["a", "b", "c"], ValueFunction::Max)
            .states(3)
            .trans(0, "a", 1, 0)
            .trans(1, "b", 2, 3)
            .trans(2, "c", 0, 1)
            .trans(0, "b", 0, 0)
            .trans(0, "c", 0, 0)
            .trans(1, "a", 1, 0)
            .trans(1, "c", 1, 0)
            .trans(2, "a", 2, 0)
            .trans(2, "b", 2, 0)
            .build()
            .unwrap();
        let abc = FiniteWord::from_str_tokens("a b c").unwrap();
        assert_eq!(eval_finite(&max, &abc).unwrap().value, r("3"));
        let last = max.with_valuefn(ValueFunction::Last);
        assert_eq!(eval_finite(&last, &abc).unwrap().value, r("1"));

        assert!(matches!(
            eval_lasso(&sum, &lasso("", "a")),
            Err(Error::WrongSemantics { .. })
        ));
        assert!(matches!(
            eval_finite(&counter(ValueFunction::LimAvg), &w),
            Err(Error::WrongSemantics { .. })
        ));
        assert!(matches!(
            eval_lasso(&counter(ValueFunction::Sup), &lasso("", "c")),
            Err(Error::UnknownSymbol(_))
        ));
    }

    /// Exhaustive run enumeration for nondeterministic Sum.
    #[test]
    fn finite_sum_matches_run_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let weights = ["0", "1", "-1/2", "2/3"];
        for _ in 0..50 {
            let n = rng.random_range(1..=3);
            let mut b = WeightedAutomaton::builder("n", &["a", "b"], ValueFunction::Sum).states(n);
            for q in 0..n {
                for s in ["a", "b"] {
                    for _ in 0..rng.random_range(1..=2) {
                        let w = weights[rng.random_range(0..weights.len())];
                        b = b.trans(q, s, rng.random_range(0..n), w);
                    }
                }
            }
            let a = b.build().unwrap();
            for len in 1..=6 {
                let word: Vec<&str> = (0..len).map(|_| if rng.random_bool(0.5) { "a" } else { "b" }).collect();
                let fw = FiniteWord::from_str_tokens(&word.join(" ")).unwrap();
                fn runs(a: &WeightedAutomaton, q: usize, syms: &[usize], acc: Rational, out: &mut Vec<Rational>) {
                    match syms.split_first() {
                        None => out.push(acc),
                        Some((&s, rest)) => {
                            for t in a.successors(q, s) {
                                runs(a, t.dst, rest, &acc + &t.weight, out);
                            }
                        }
                    }
                }
                let mut all = Vec::new();
                runs(&a, 0, &fw.indices_in(&a).unwrap(), Rational::zero(), &mut all);
                assert_eq!(eval_finite(&a, &fw).unwrap().value, all.into_iter().max().unwrap());
            }
        }
    }
}
