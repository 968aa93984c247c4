//! Weighted digraphs and the algorithms evaluation runs on: strongly
//! connected components, Karp's minimum cycle mean, and exact policy
//! iteration for discounted sums.

use std::collections::VecDeque;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Rational,
}

/// Directed multigraph with rational edge weights. Edge ids are insertion order.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(num_nodes: usize) -> Self {
        Digraph {
            edges: Vec::new(),
            out: vec![Vec::new(); num_nodes],
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, weight: Rational) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { from, to, weight });
        self.out[from].push(id);
        id
    }

    pub fn num_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.out[v] {
                let w = self.edges[e].to;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// SCCs of the subgraph of edges accepted by `keep`.
    pub fn sccs_filtered(&self, keep: impl Fn(usize, &Edge) -> bool) -> Sccs {
        tarjan(self, &keep)
    }

    pub fn sccs(&self) -> Sccs {
        tarjan(self, &|_, _| true)
    }

    /// Shortest (fewest edges) path from `from` to any node satisfying
    /// `is_target`, using only edges accepted by `keep`. Returns edge ids.
    pub fn bfs_path(
        &self,
        from: usize,
        is_target: impl Fn(usize) -> bool,
        keep: impl Fn(usize, &Edge) -> bool,
    ) -> Option<Vec<usize>> {
        if is_target(from) {
            return Some(Vec::new());
        }
        let mut pred: Vec<Option<usize>> = vec![None; self.num_nodes()];
        let mut seen = vec![false; self.num_nodes()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out[v] {
                let edge = &self.edges[e];
                if !keep(e, edge) || seen[edge.to] {
                    continue;
                }
                seen[edge.to] = true;
                pred[edge.to] = Some(e);
                if is_target(edge.to) {
                    let mut path = vec![e];
                    let mut cur = v;
                    while cur != from {
                        let p = pred[cur].expect("bfs predecessor");
                        path.push(p);
                        cur = self.edges[p].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(edge.to);
            }
        }
        None
    }
}

/// Strongly connected components.
#[derive(Debug, Clone)]
pub struct Sccs {
    /// Component id of each node.
    pub component: Vec<usize>,
    /// Nodes of each component, ascending.
    pub members: Vec<Vec<usize>>,
    /// Whether the component contains at least one of its own edges.
    pub nontrivial: Vec<bool>,
}

fn tarjan(g: &Digraph, keep: &dyn Fn(usize, &Edge) -> bool) -> Sccs {
    let n = g.num_nodes();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component = vec![UNSET; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0usize;

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        // (node, next out-edge position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < g.out[v].len() {
                let e = g.out[v][*pos];
                *pos += 1;
                let edge = &g.edges[e];
                if !keep(e, edge) {
                    continue;
                }
                let w = edge.to;
                if index[w] == UNSET {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let id = members.len();
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component[w] = id;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    members.push(comp);
                }
            }
        }
    }

    let mut nontrivial = vec![false; members.len()];
    for (e, edge) in g.edges.iter().enumerate() {
        if keep(e, edge) && component[edge.from] == component[edge.to] {
            nontrivial[component[edge.from]] = true;
        }
    }
    Sccs {
        component,
        members,
        nontrivial,
    }
}

/// A cycle (edge ids, consecutive, closing) and its exact mean weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleMean {
    pub mean: Rational,
    pub cycle: Vec<usize>,
}

/// Minimum cycle mean over all cycles of `g`, or `None` if `g` is acyclic.
pub fn min_cycle_mean(g: &Digraph) -> Option<CycleMean> {
    extreme_cycle_mean(g, false)
}

/// Maximum cycle mean over all cycles of `g`, or `None` if `g` is acyclic.
pub fn max_cycle_mean(g: &Digraph) -> Option<CycleMean> {
    extreme_cycle_mean(g, true)
}

fn extreme_cycle_mean(g: &Digraph, maximize: bool) -> Option<CycleMean> {
    let sccs = g.sccs();
    let mut best: Option<CycleMean> = None;
    for (c, nodes) in sccs.members.iter().enumerate() {
        if !sccs.nontrivial[c] {
            continue;
        }
        let found = scc_cycle_mean(g, nodes, &sccs.component, maximize);
        best = match best {
            None => Some(found),
            Some(b) => {
                let better = if maximize {
                    found.mean > b.mean
                } else {
                    found.mean < b.mean
                };
                Some(if better { found } else { b })
            }
        };
    }
    best
}

/// Karp's minimum (or, negated, maximum) cycle mean restricted to one
/// nontrivial SCC given by `nodes`; `component` maps graph nodes to SCC ids.
pub(crate) fn scc_cycle_mean(g: &Digraph, nodes: &[usize], component: &[usize], maximize: bool) -> CycleMean {
    let comp = component[nodes[0]];
    let mut local = vec![usize::MAX; g.num_nodes()];
    for (i, &v) in nodes.iter().enumerate() {
        local[v] = i;
    }
    let internal: Vec<usize> = nodes
        .iter()
        .flat_map(|&v| g.out_edges(v).iter().copied())
        .filter(|&e| component[g.edge(e).to] == comp)
        .collect();
    let scale = Rational::common_denominator(internal.iter().map(|&e| &g.edge(e).weight));
    let int_weights: Vec<BigInt> = internal
        .iter()
        .map(|&e| {
            let w = g.edge(e).weight.scaled_integer(&scale);
            if maximize {
                -w
            } else {
                w
            }
        })
        .collect();
    let local_edges: Vec<(usize, usize)> = internal
        .iter()
        .map(|&e| (local[g.edge(e).from], local[g.edge(e).to]))
        .collect();

    let n = nodes.len() as i64;
    let max_abs = int_weights.iter().map(|w| w.abs()).max().unwrap_or_default();
    let fits_i64 = (&max_abs + 1u32) * BigInt::from(n + 1) * BigInt::from(n + 1) < BigInt::from(i64::MAX / 4);
    let walk = if fits_i64 {
        let ws: Vec<i64> = int_weights.iter().map(|w| w.to_i64().unwrap()).collect();
        karp(nodes.len(), &local_edges, &ws)
    } else {
        karp(nodes.len(), &local_edges, &int_weights)
    };

    // first cycle along the critical walk has the optimal mean
    let walk_nodes: Vec<usize> = std::iter::once(local_edges[walk[0]].0)
        .chain(walk.iter().map(|&i| local_edges[i].1))
        .collect();
    let mut last_seen = vec![usize::MAX; nodes.len()];
    let mut cycle_local = Vec::new();
    for (j, &v) in walk_nodes.iter().enumerate() {
        if last_seen[v] != usize::MAX {
            cycle_local = walk[last_seen[v]..j].to_vec();
            break;
        }
        last_seen[v] = j;
    }
    let cycle: Vec<usize> = cycle_local.iter().map(|&i| internal[i]).collect();
    let total: Rational = cycle.iter().map(|&e| &g.edge(e).weight).sum();
    let mean = total / Rational::integer(cycle.len() as i64);
    CycleMean { mean, cycle }
}

trait KarpNum: Clone + Ord + Zero + From<i64> + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {}
impl KarpNum for i64 {}
impl KarpNum for BigInt {}

/// Karp's dynamic program on a strongly connected graph with `n` nodes.
/// Returns a minimum-weight walk of `n` edges (indices into `edges`) ending
/// at a node attaining the minimum mean; every cycle on it is optimal.
fn karp<T: KarpNum>(n: usize, edges: &[(usize, usize)], weights: &[T]) -> Vec<usize> {
    // dist[k][v]: minimum weight of a walk with exactly k edges ending at v,
    // starting anywhere
    let mut dist: Vec<Vec<Option<T>>> = vec![vec![None; n]; n + 1];
    let mut pred: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; n + 1];
    dist[0].fill(Some(T::zero()));
    for k in 1..=n {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if let Some(du) = dist[k - 1][u].clone() {
                let cand = du + weights[i].clone();
                let better = match &dist[k][v] {
                    None => true,
                    Some(dv) => cand < *dv,
                };
                if better {
                    dist[k][v] = Some(cand);
                    pred[k][v] = i;
                }
            }
        }
    }
    // minimize over v of max over k of (D_n(v) - D_k(v)) / (n - k)
    let mut best: Option<(T, T, usize)> = None;
    for v in 0..n {
        let Some(dn) = dist[n][v].clone() else {
            continue;
        };
        let mut worst: Option<(T, T)> = None;
        for (k, row) in dist.iter().enumerate().take(n) {
            let Some(dk) = row[v].clone() else { continue };
            let num = dn.clone() - dk;
            let den = T::from((n - k) as i64);
            let larger = match &worst {
                None => true,
                Some((wn, wd)) => num.clone() * wd.clone() > wn.clone() * den.clone(),
            };
            if larger {
                worst = Some((num, den));
            }
        }
        let Some((wn, wd)) = worst else { continue };
        let smaller = match &best {
            None => true,
            Some((bn, bd, _)) => wn.clone() * bd.clone() < bn.clone() * wd.clone(),
        };
        if smaller {
            best = Some((wn, wd, v));
        }
    }
    let (_, _, v) = best.expect("strongly connected component has a cycle");
    let mut walk = Vec::with_capacity(n);
    let mut cur = v;
    for k in (1..=n).rev() {
        let e = pred[k][cur];
        walk.push(e);
        cur = edges[e].0;
    }
    walk.reverse();
    walk
}

/// Optimal discounted value of a memoryless policy.
#[derive(Debug, Clone)]
pub struct DiscountedSolution {
    /// Value at the start node.
    pub value: Rational,
    /// Value of each node reachable from the start node.
    pub values: Vec<Option<Rational>>,
    /// Chosen edge id for each reachable node.
    pub policy: Vec<Option<usize>>,
}

impl DiscountedSolution {
    /// The lasso followed from `start` under the policy: `(stem, cycle)` edge ids.
    pub fn lasso(&self, g: &Digraph, start: usize) -> (Vec<usize>, Vec<usize>) {
        let mut order: Vec<usize> = Vec::new();
        let mut position = vec![usize::MAX; g.num_nodes()];
        let mut v = start;
        while position[v] == usize::MAX {
            position[v] = order.len();
            let e = self.policy[v].expect("policy defined on reachable nodes");
            order.push(e);
            v = g.edge(e).to;
        }
        let split = position[v];
        (order[..split].to_vec(), order[split..].to_vec())
    }
}

/// Maximum discounted sum `Σ λ^i w_i` over infinite paths from `start`,
/// computed by policy iteration with exact policy evaluation.
///
/// Improvement switches a node's edge only on strict gain; among the best
/// successors the one with the lowest target node (then lowest edge id) wins.
pub fn disc_policy_iteration(g: &Digraph, start: usize, lambda: &Rational) -> Result<DiscountedSolution> {
    if !(lambda.is_positive() && *lambda < Rational::one()) {
        return Err(Error::precondition(format!("discount factor {lambda} outside (0, 1)")));
    }
    let reach = g.reachable_from(start);
    let n = g.num_nodes();
    let mut policy: Vec<Option<usize>> = vec![None; n];
    for v in (0..n).filter(|&v| reach[v]) {
        let choice = g
            .out_edges(v)
            .iter()
            .copied()
            .min_by_key(|&e| (g.edge(e).to, e))
            .ok_or_else(|| Error::precondition(format!("node {v} has no successor")))?;
        policy[v] = Some(choice);
    }
    loop {
        let values = evaluate_policy(g, &policy, lambda);
        let mut changed = false;
        for v in (0..n).filter(|&v| reach[v]) {
            let current = values[v].as_ref().expect("reachable value");
            let mut best: Option<(Rational, usize)> = None;
            for &e in g.out_edges(v) {
                let edge = g.edge(e);
                let q = &edge.weight + &(lambda * values[edge.to].as_ref().expect("value"));
                let take = match &best {
                    None => true,
                    Some((bq, be)) => q > *bq || (q == *bq && (edge.to, e) < (g.edge(*be).to, *be)),
                };
                if take {
                    best = Some((q, e));
                }
            }
            let (bq, be) = best.expect("nonempty successors");
            if bq > *current {
                policy[v] = Some(be);
                changed = true;
            }
        }
        if !changed {
            return Ok(DiscountedSolution {
                value: values[start].clone().expect("start value"),
                values,
                policy,
            });
        }
    }
}

/// Exact values of a memoryless policy: every chain ends in a cycle, whose
/// value is a closed geometric series.
fn evaluate_policy(g: &Digraph, policy: &[Option<usize>], lambda: &Rational) -> Vec<Option<Rational>> {
    let n = g.num_nodes();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    // 0 = unvisited, 1 = on current chain, 2 = done
    let mut state = vec![0u8; n];
    for s in 0..n {
        if policy[s].is_none() || state[s] != 0 {
            continue;
        }
        let mut chain: Vec<usize> = Vec::new();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            chain.push(v);
            v = g.edge(policy[v].unwrap()).to;
        }
        let mut settled = chain.len();
        if state[v] == 1 {
            // new cycle starting at v
            let at = chain.iter().position(|&x| x == v).unwrap();
            let cycle = &chain[at..];
            let weights: Vec<Rational> = cycle
                .iter()
                .map(|&x| g.edge(policy[x].unwrap()).weight.clone())
                .collect();
            let first = crate::valuefn::discounted_lasso(lambda, &[], &weights);
            values[cycle[0]] = Some(first);
            for i in (1..cycle.len()).rev() {
                let next = if i + 1 < cycle.len() { cycle[i + 1] } else { cycle[0] };
                let val = &weights[i] + &(lambda * values[next].as_ref().unwrap());
                values[cycle[i]] = Some(val);
            }
            for &x in cycle {
                state[x] = 2;
            }
            settled = at;
        }
        for i in (0..settled).rev() {
            let x = chain[i];
            let e = g.edge(policy[x].unwrap());
            let val = &e.weight + &(lambda * values[e.to].as_ref().unwrap());
            values[x] = Some(val);
            state[x] = 2;
        }
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn graph(n: usize, edges: &[(usize, usize, &str)]) -> Digraph {
        let mut g = Digraph::new(n);
        for &(a, b, w) in edges {
            g.add_edge(a, b, r(w));
        }
        g
    }

    /// Brute force: all simple cycles via DFS from each smallest node.
    fn simple_cycle_means(g: &Digraph) -> Vec<Rational> {
        let mut out = Vec::new();
        fn dfs(g: &Digraph, root: usize, v: usize, on: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut Vec<Rational>) {
            for &e in g.out_edges(v) {
                let w = g.edge(e).to;
                if w == root {
                    path.push(e);
                    let s: Rational = path.iter().map(|&x| &g.edge(x).weight).sum();
                    out.push(s / Rational::integer(path.len() as i64));
                    path.pop();
                } else if w > root && !on[w] {
                    on[w] = true;
                    path.push(e);
                    dfs(g, root, w, on, path, out);
                    path.pop();
                    on[w] = false;
                }
            }
        }
        for root in 0..g.num_nodes() {
            let mut on = vec![false; g.num_nodes()];
            on[root] = true;
            dfs(g, root, root, &mut on, &mut Vec::new(), &mut out);
        }
        out
    }

    #[test]
    fn self_loop_mean() {
        let g = graph(1, &[(0, 0, "1/2")]);
        assert_eq!(min_cycle_mean(&g).unwrap().mean, r("1/2"));
        assert_eq!(max_cycle_mean(&g).unwrap().mean, r("1/2"));
    }

    #[test]
    fn triangle_mean_matches_enumeration() {
        let g = graph(3, &[(0, 1, "1"), (1, 2, "2"), (2, 0, "3")]);
        let means = simple_cycle_means(&g);
        assert_eq!(means, vec![r("2")]);
        assert_eq!(min_cycle_mean(&g).unwrap().mean, r("2"));
        assert_eq!(max_cycle_mean(&g).unwrap().mean, r("2"));
    }

    #[test]
    fn disjoint_loops() {
        let g = graph(2, &[(0, 0, "0"), (1, 1, "1")]);
        assert_eq!(min_cycle_mean(&g).unwrap().mean, r("0"));
        assert_eq!(max_cycle_mean(&g).unwrap().mean, r("1"));
    }

    #[test]
    fn acyclic_has_no_mean() {
        let g = graph(3, &[(0, 1, "1"), (1, 2, "2")]);
        assert!(min_cycle_mean(&g).is_none());
        assert!(max_cycle_mean(&g).is_none());
    }

    #[test]
    fn cycle_witness_is_a_closed_cycle_with_the_mean() {
        let g = graph(
            4,
            &[
                (0, 1, "3"),
                (1, 0, "-1"),
                (1, 2, "1/2"),
                (2, 3, "5"),
                (3, 1, "-2"),
                (2, 2, "1/3"),
            ],
        );
        for maximize in [false, true] {
            let cm = if maximize {
                max_cycle_mean(&g)
            } else {
                min_cycle_mean(&g)
            }
            .unwrap();
            let edges: Vec<&Edge> = cm.cycle.iter().map(|&e| g.edge(e)).collect();
            for w in edges.windows(2) {
                assert_eq!(w[0].to, w[1].from);
            }
            assert_eq!(edges.last().unwrap().to, edges[0].from);
            let means = simple_cycle_means(&g);
            let expect = if maximize {
                means.iter().max()
            } else {
                means.iter().min()
            };
            assert_eq!(&cm.mean, expect.unwrap());
        }
    }

    #[test]
    fn random_graphs_match_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let weights = ["0", "1/3", "1/2", "1", "-2", "7/4"];
        for _ in 0..300 {
            let n = rng.random_range(1..=5);
            let m = rng.random_range(1..=10);
            let mut g = Digraph::new(n);
            for _ in 0..m {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                g.add_edge(a, b, r(weights[rng.random_range(0..weights.len())]));
            }
            let means = simple_cycle_means(&g);
            let lo = min_cycle_mean(&g).map(|c| c.mean);
            let hi = max_cycle_mean(&g).map(|c| c.mean);
            assert_eq!(lo.as_ref(), means.iter().min());
            assert_eq!(hi.as_ref(), means.iter().max());
            if let (Some(lo), Some(hi)) = (lo, hi) {
                assert!(lo <= hi);
                assert_eq!(lo == hi, means.iter().all(|m| *m == means[0]));
            }
        }
    }

    #[test]
    fn scc_decomposition() {
        let g = graph(4, &[(0, 1, "0"), (1, 0, "0"), (1, 2, "0"), (3, 3, "0")]);
        let s = g.sccs();
        assert_eq!(s.component[0], s.component[1]);
        assert_ne!(s.component[1], s.component[2]);
        assert!(s.nontrivial[s.component[0]]);
        assert!(!s.nontrivial[s.component[2]]);
        assert!(s.nontrivial[s.component[3]]);
    }

    #[test]
    fn discounted_single_loop() {
        let g = graph(1, &[(0, 0, "1")]);
        let sol = disc_policy_iteration(&g, 0, &r("1/2")).unwrap();
        assert_eq!(sol.value, r("2"));
    }

    #[test]
    fn discounted_picks_dominant_loop() {
        // node 0 chooses between a loop of weight 0 and moving to a loop of weight 1
        let g = graph(3, &[(0, 1, "0"), (1, 1, "0"), (0, 2, "1"), (2, 2, "1")]);
        let lambda = r("1/3");
        let sol = disc_policy_iteration(&g, 0, &lambda).unwrap();
        assert_eq!(sol.value, Rational::one() / (Rational::one() - lambda));
        let (stem, cycle) = sol.lasso(&g, 0);
        assert_eq!(stem.len(), 1);
        assert_eq!(g.edge(stem[0]).to, 2);
        assert_eq!(cycle.len(), 1);
    }

    /// Value iteration with interval bounds pins the optimum; compare.
    #[test]
    fn discounted_matches_value_iteration_bounds() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let weights = ["0", "1", "1/2", "-1/3"];
        for _ in 0..100 {
            let n = 3;
            let mut g = Digraph::new(n);
            for v in 0..n {
                for _ in 0..rng.random_range(1..=2) {
                    let to = rng.random_range(0..n);
                    g.add_edge(v, to, r(weights[rng.random_range(0..weights.len())]));
                }
            }
            let lambda = r("1/2");
            let sol = disc_policy_iteration(&g, 0, &lambda).unwrap();
            // u_k(v) = max over k-step paths; true value within V·λ^k/(1-λ)
            let big_v = Rational::one();
            let mut u = vec![Rational::zero(); n];
            for k in 0..40 {
                let mut next = vec![None::<Rational>; n];
                for (e, edge) in g.edges().iter().enumerate() {
                    let _ = e;
                    let cand = &edge.weight + &(&lambda * &u[edge.to]);
                    let slot = &mut next[edge.from];
                    if slot.as_ref().is_none_or(|s| cand > *s) {
                        *slot = Some(cand);
                    }
                }
                u = next.into_iter().map(Option::unwrap).collect();
                let tail = &big_v * &lambda.pow(k + 1) / (Rational::one() - &lambda);
                assert!(sol.value <= &u[0] + &tail);
                assert!(sol.value >= &u[0] - &tail);
            }
        }
    }
}
