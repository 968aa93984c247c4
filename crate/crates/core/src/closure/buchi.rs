//! Büchi automata as {0,1}-weighted LimSup automata, threshold slicing and
//! rank-based complementation.

use std::collections::HashMap;

use super::Limits;
use crate::automaton::{Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::eval::eval_lasso;
use crate::graph::Digraph;
use crate::rational::Rational;
use crate::valuefn::ValueFunction;
use crate::word::LassoWord;

/// LimSup automaton with weights in {0, 1}; weight-1 transitions accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton(WeightedAutomaton);

impl BuchiAutomaton {
    pub fn new(aut: WeightedAutomaton) -> Result<Self> {
        if aut.valuefn() != &ValueFunction::LimSup {
            return Err(Error::WrongSemantics {
                operation: "Buchi view",
                expected: "LimSup",
                found: aut.valuefn().to_string(),
            });
        }
        if let Some(t) = aut
            .transitions()
            .iter()
            .find(|t| !(t.weight.is_zero() || t.weight.is_one()))
        {
            return Err(Error::InvalidAutomaton(format!(
                "Buchi automata have weights 0 or 1, found {}",
                t.weight
            )));
        }
        Ok(BuchiAutomaton(aut))
    }

    pub fn automaton(&self) -> &WeightedAutomaton {
        &self.0
    }

    pub fn into_automaton(self) -> WeightedAutomaton {
        self.0
    }

    pub fn num_states(&self) -> usize {
        self.0.num_states()
    }

    pub fn is_accepting(t: &Transition) -> bool {
        t.weight.is_one()
    }

    /// Some run takes accepting transitions infinitely often.
    pub fn accepts(&self, word: &LassoWord) -> Result<bool> {
        Ok(eval_lasso(&self.0, word)?.value.is_one())
    }
}

/// Büchi automaton for `{w : L_A(w) ≥ v}` of a LimSup automaton: the
/// accepting transitions are those of weight at least `v`.
pub fn threshold_nbw(aut: &WeightedAutomaton, v: &Rational) -> Result<BuchiAutomaton> {
    if aut.valuefn() != &ValueFunction::LimSup {
        return Err(Error::WrongSemantics {
            operation: "threshold slicing",
            expected: "LimSup",
            found: aut.valuefn().to_string(),
        });
    }
    let sliced = aut.map_weights(|t| {
        if t.weight >= *v {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    BuchiAutomaton::new(sliced.with_name(format!("{}_ge", aut.name())))
}

pub fn complement_nbw(b: &BuchiAutomaton) -> Result<BuchiAutomaton> {
    complement_nbw_with(b, &Limits::default())
}

const NONE: u8 = u8::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
enum CompState {
    /// Subset phase: the set of states reached so far.
    Subset(u64),
    /// Ranked phase: a tight level ranking and the breakpoint set `O` of
    /// even-ranked states still owing a visit to an odd rank.
    Ranked(Vec<u8>, u64),
    Sink,
}

/// Complement of a Büchi automaton with transition acceptance.
///
/// Runs through the input's run DAG are ranked: ranks never increase along
/// a transition, and an accepting transition leaving an odd rank must
/// strictly decrease it. A run DAG with no accepting path admits such a
/// ranking where every path is eventually trapped in an odd rank, and the
/// ranking is eventually tight (its maximum is odd and every odd rank below
/// it is used). The complement guesses the point from which the ranking is
/// tight (deterministic subset phase, then ranked phase) and checks the
/// odd-trapping condition with a breakpoint set; transitions leaving a
/// state whose set is empty accept. A rejecting sink keeps the result total.
pub fn complement_nbw_with(b: &BuchiAutomaton, limits: &Limits) -> Result<BuchiAutomaton> {
    let aut = b.automaton();
    aut.ensure_valid()?;
    let n = aut.num_states();
    if n > limits.max_input_states.min(32) {
        return Err(Error::CapExceeded {
            what: "Buchi complementation input states",
            size: n,
            limit: limits.max_input_states.min(32),
        });
    }
    let k = aut.alphabet().len();

    // post[q][σ]: (target, accepting) pairs
    let post: Vec<Vec<Vec<(usize, bool)>>> = (0..n)
        .map(|q| {
            (0..k)
                .map(|s| {
                    let mut v: Vec<(usize, bool)> = aut
                        .successors(q, s)
                        .iter()
                        .map(|t| (t.dst, t.weight.is_one()))
                        .collect();
                    v.sort();
                    v.dedup();
                    v
                })
                .collect()
        })
        .collect();
    let image = |set: u64, s: usize| -> u64 {
        let mut out = 0u64;
        for q in (0..n).filter(|&q| set >> q & 1 == 1) {
            for &(d, _) in &post[q][s] {
                out |= 1 << d;
            }
        }
        out
    };

    let mut ids: HashMap<CompState, usize> = HashMap::new();
    let mut keys: Vec<CompState> = Vec::new();
    let mut transitions: Vec<Transition> = Vec::new();
    let intern = |st: CompState, ids: &mut HashMap<CompState, usize>, keys: &mut Vec<CompState>| -> Result<usize> {
        if let Some(&id) = ids.get(&st) {
            return Ok(id);
        }
        if keys.len() >= limits.max_states {
            return Err(Error::CapExceeded {
                what: "Buchi complement states",
                size: keys.len() + 1,
                limit: limits.max_states,
            });
        }
        ids.insert(st.clone(), keys.len());
        keys.push(st);
        Ok(keys.len() - 1)
    };
    intern(CompState::Subset(1 << aut.initial()), &mut ids, &mut keys)?;
    let sink = intern(CompState::Sink, &mut ids, &mut keys)?;

    let mut next = 0;
    while next < keys.len() {
        let st = keys[next].clone();
        for s in 0..k {
            let mut targets: Vec<(CompState, bool)> = Vec::new();
            match &st {
                CompState::Sink => targets.push((CompState::Sink, false)),
                CompState::Subset(set) => {
                    let img = image(*set, s);
                    targets.push((CompState::Subset(img), false));
                    // unconstrained tight rankings on the image
                    let bounds: Vec<u8> = (0..n)
                        .map(|q| if img >> q & 1 == 1 { (2 * n - 1) as u8 } else { NONE })
                        .collect();
                    for f in tight_rankings(&bounds) {
                        let o = even_set(&f);
                        targets.push((CompState::Ranked(f, o), false));
                    }
                }
                CompState::Ranked(f, o) => {
                    // odd ranks are at least 1, so every bound stays non-negative
                    let mut bounds = vec![NONE; n];
                    for q in (0..n).filter(|&q| f[q] != NONE) {
                        for &(d, acc) in &post[q][s] {
                            let cap = if acc && f[q] % 2 == 1 { f[q] - 1 } else { f[q] };
                            bounds[d] = bounds[d].min(cap);
                        }
                    }
                    let accepting = *o == 0;
                    let from_set = if accepting {
                        (0..n).filter(|&q| f[q] != NONE).fold(0u64, |m, q| m | 1 << q)
                    } else {
                        *o
                    };
                    let owed = image(from_set, s);
                    for g in tight_rankings(&bounds) {
                        let o2 = even_set(&g) & owed;
                        targets.push((CompState::Ranked(g, o2), accepting));
                    }
                }
            }
            if targets.is_empty() {
                targets.push((CompState::Sink, false));
            }
            for (t, acc) in targets {
                let dst = if t == CompState::Sink {
                    sink
                } else {
                    intern(t, &mut ids, &mut keys)?
                };
                transitions.push(Transition {
                    src: next,
                    symbol: s,
                    dst,
                    weight: if acc { Rational::one() } else { Rational::zero() },
                });
            }
        }
        next += 1;
    }
    let out = WeightedAutomaton::new(
        format!("not_{}", aut.name()),
        aut.alphabet().to_vec(),
        keys.len(),
        0,
        ValueFunction::LimSup,
        transitions,
    )?;
    reduce_buchi(&BuchiAutomaton::new(out)?)
}

/// Outgoing `(symbol, accepting, target block)` triples of a state.
type Signature = Vec<(usize, bool, usize)>;

/// Language-preserving reduction: states that cannot reach an accepting
/// cycle are merged into one rejecting sink, then bisimilar states are
/// merged. Of two parallel transitions the accepting one is kept.
pub fn reduce_buchi(b: &BuchiAutomaton) -> Result<BuchiAutomaton> {
    let aut = b.automaton();
    let n = aut.num_states();
    let k = aut.alphabet().len();
    let mut g = Digraph::new(n);
    for t in aut.transitions() {
        g.add_edge(t.src, t.dst, t.weight.clone());
    }
    let sccs = g.sccs();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut live = vec![false; n];
    let mut queue = Vec::new();
    for t in aut.transitions() {
        rev[t.dst].push(t.src);
        if t.weight.is_one() && sccs.component[t.src] == sccs.component[t.dst] && !live[t.src] {
            live[t.src] = true;
            queue.push(t.src);
        }
    }
    while let Some(q) = queue.pop() {
        for &p in &rev[q] {
            if !live[p] {
                live[p] = true;
                queue.push(p);
            }
        }
    }
    // block 0 holds the dead states
    let mut block: Vec<usize> = live.iter().map(|&l| usize::from(l)).collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<(usize, Signature), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for q in (0..n).filter(|&q| live[q]) {
            let mut sig: Vec<_> = aut
                .outgoing(q)
                .iter()
                .map(|t| (t.symbol, t.weight.is_one(), block[t.dst]))
                .collect();
            sig.sort();
            sig.dedup();
            let fresh = ids.len() + 1;
            next[q] = *ids.entry((block[q], sig)).or_insert(fresh);
        }
        block = next;
        if ids.len() + 1 == count {
            break;
        }
        count = ids.len() + 1;
    }
    let mut rep = vec![usize::MAX; count];
    for q in 0..n {
        if rep[block[q]] == usize::MAX {
            rep[block[q]] = q;
        }
    }
    // initial block first, then live blocks by first state, then the sink
    let mut renumber = vec![usize::MAX; count];
    let mut order = Vec::new();
    let live_blocks = (0..n).map(|q| block[q]).filter(|&b| b != 0);
    let sink = live.iter().any(|&l| !l).then_some(0);
    for bl in std::iter::once(block[aut.initial()]).chain(live_blocks).chain(sink) {
        if renumber[bl] == usize::MAX {
            renumber[bl] = order.len();
            order.push(bl);
        }
    }
    let mut transitions = Vec::new();
    for &bl in &order {
        let src = renumber[bl];
        if bl == 0 {
            for s in 0..k {
                transitions.push(Transition {
                    src,
                    symbol: s,
                    dst: src,
                    weight: Rational::zero(),
                });
            }
            continue;
        }
        let mut edges: Vec<(usize, usize, bool)> = aut
            .outgoing(rep[bl])
            .iter()
            .map(|t| (t.symbol, renumber[block[t.dst]], t.weight.is_one()))
            .collect();
        edges.sort();
        edges.dedup_by(|later, earlier| {
            later.0 == earlier.0 && later.1 == earlier.1 && {
                earlier.2 |= later.2;
                true
            }
        });
        for (symbol, dst, acc) in edges {
            transitions.push(Transition {
                src,
                symbol,
                dst,
                weight: if acc { Rational::one() } else { Rational::zero() },
            });
        }
    }
    let out = WeightedAutomaton::new(
        aut.name(),
        aut.alphabet().to_vec(),
        order.len(),
        0,
        ValueFunction::LimSup,
        transitions,
    )?;
    BuchiAutomaton::new(out)
}

fn even_set(f: &[u8]) -> u64 {
    f.iter()
        .enumerate()
        .filter(|(_, &r)| r != NONE && r % 2 == 0)
        .fold(0u64, |m, (q, _)| m | 1 << q)
}

/// All rankings `g ≤ bounds` on the defined positions that are tight: the
/// maximum rank is odd and every odd rank below it occurs.
fn tight_rankings(bounds: &[u8]) -> Vec<Vec<u8>> {
    let defined: Vec<usize> = (0..bounds.len()).filter(|&q| bounds[q] != NONE).collect();
    let mut out = Vec::new();
    let mut cur = vec![NONE; bounds.len()];
    fn rec(i: usize, defined: &[usize], bounds: &[u8], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == defined.len() {
            let max = defined.iter().map(|&q| cur[q]).max().unwrap_or(0);
            if max % 2 == 1 && (1..max).step_by(2).all(|r| defined.iter().any(|&q| cur[q] == r)) {
                out.push(cur.clone());
            }
            return;
        }
        let q = defined[i];
        // a tight ranking on k states uses ranks below 2k
        let top = bounds[q].min((2 * defined.len() - 1) as u8);
        for r in 0..=top {
            cur[q] = r;
            rec(i + 1, defined, bounds, cur, out);
        }
        cur[q] = NONE;
    }
    if !defined.is_empty() {
        rec(0, &defined, bounds, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf_a() -> BuchiAutomaton {
        let a = WeightedAutomaton::builder("inf_a", &["a", "b"], ValueFunction::LimSup)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        BuchiAutomaton::new(a).unwrap()
    }

    fn w(p: &str, c: &str) -> LassoWord {
        LassoWord::from_strs(p, c).unwrap()
    }

    #[test]
    fn rejects_non_boolean_weights() {
        let a = WeightedAutomaton::builder("x", &["a"], ValueFunction::LimSup)
            .trans(0, "a", 0, "1/2")
            .build()
            .unwrap();
        assert!(BuchiAutomaton::new(a).is_err());
    }

    #[test]
    fn complement_of_infinitely_many_a() {
        let c = complement_nbw(&inf_a()).unwrap();
        assert!(!c.accepts(&w("", "a b")).unwrap());
        assert!(c.accepts(&w("a", "b")).unwrap());
        assert!(!c.accepts(&w("b", "a")).unwrap());
    }

    #[test]
    fn complement_of_universal_is_empty() {
        let a = WeightedAutomaton::builder("all", &["a", "b"], ValueFunction::LimSup)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 1)
            .build()
            .unwrap();
        let c = complement_nbw(&BuchiAutomaton::new(a).unwrap()).unwrap();
        for (p, q) in [("", "a"), ("a b", "b"), ("b", "a b b")] {
            assert!(!c.accepts(&w(p, q)).unwrap());
        }
    }

    #[test]
    fn threshold_slices() {
        let a = WeightedAutomaton::builder("t", &["a", "b"], ValueFunction::LimSup)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        let all = threshold_nbw(&a, &Rational::zero()).unwrap();
        assert!(all.automaton().transitions().iter().all(BuchiAutomaton::is_accepting));
        let none = threshold_nbw(&a, &Rational::integer(2)).unwrap();
        assert!(!none.automaton().transitions().iter().any(BuchiAutomaton::is_accepting));
        let ones = threshold_nbw(&a, &Rational::one()).unwrap();
        assert!(ones.accepts(&w("", "b a")).unwrap());
        assert!(!ones.accepts(&w("a a", "b")).unwrap());
    }

    #[test]
    fn tight_rankings_small() {
        assert_eq!(tight_rankings(&[3, NONE]), vec![vec![1, NONE]]);
        let two = tight_rankings(&[3, 3]);
        assert!(two.contains(&vec![1, 3]));
        assert!(two.contains(&vec![0, 1]));
        assert!(!two.contains(&vec![3, 3]));
        assert!(!two.contains(&vec![2, 2]));
    }
}
