//! Weighted automata, validation, and the shift/scale transformations.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};

/// A weighted transition `(src, symbol, dst, weight)`; `symbol` indexes the
/// automaton's alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub src: usize,
    pub symbol: usize,
    pub dst: usize,
    pub weight: Rational,
}

/// `A = ⟨Q, q_I, Σ, δ, γ⟩` together with its value function.
///
/// Transitions are stored sorted by `(src, symbol, dst, weight)` with exact
/// duplicates removed. Two transitions may share `(src, symbol, dst)` with
/// different weights; the value of a word is a sup over runs, so the larger
/// one dominates (see [`WeightedAutomaton::normalize_duplicates`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton {
    name: String,
    alphabet: Vec<String>,
    num_states: usize,
    initial: usize,
    transitions: Vec<Transition>,
    valuefn: ValueFunction,
    provenance: Option<String>,
    // transitions for (q, σ) live in offsets[q*|Σ|+σ] .. offsets[q*|Σ|+σ+1]
    offsets: Vec<usize>,
}

pub(crate) fn valid_symbol(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == '|' || c == '#')
}

pub(crate) fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '(' | ')' | ','))
}

impl WeightedAutomaton {
    /// Builds an automaton. Checks structural well-formedness (indices in
    /// range, distinct symbols) but not totality or the discount range;
    /// use [`validate`](Self::validate) for those.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<String>,
        num_states: usize,
        initial: usize,
        valuefn: ValueFunction,
        mut transitions: Vec<Transition>,
    ) -> Result<Self> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(Error::InvalidAutomaton(format!("bad automaton name `{name}`")));
        }
        if alphabet.is_empty() {
            return Err(Error::InvalidAutomaton("empty alphabet".into()));
        }
        for (i, s) in alphabet.iter().enumerate() {
            if !valid_symbol(s) {
                return Err(Error::InvalidAutomaton(format!("bad symbol `{s}`")));
            }
            if alphabet[..i].contains(s) {
                return Err(Error::InvalidAutomaton(format!("duplicate symbol `{s}`")));
            }
        }
        if num_states == 0 {
            return Err(Error::InvalidAutomaton("no states".into()));
        }
        if initial >= num_states {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        for t in &transitions {
            if t.src >= num_states || t.dst >= num_states || t.symbol >= alphabet.len() {
                return Err(Error::InvalidAutomaton(format!(
                    "transition {} {} {} out of range",
                    t.src, t.symbol, t.dst
                )));
            }
        }
        transitions.sort();
        transitions.dedup();
        let k = alphabet.len();
        let mut offsets = vec![0usize; num_states * k + 1];
        for t in &transitions {
            offsets[t.src * k + t.symbol + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        Ok(WeightedAutomaton {
            name,
            alphabet,
            num_states,
            initial,
            transitions,
            valuefn,
            provenance: None,
            offsets,
        })
    }

    pub fn builder(name: &str, alphabet: &[&str], valuefn: ValueFunction) -> AutomatonBuilder {
        AutomatonBuilder {
            name: name.to_string(),
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            states: 1,
            initial: 0,
            valuefn,
            transitions: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn valuefn(&self) -> &ValueFunction {
        &self.valuefn
    }

    pub fn tag(&self) -> Tag {
        self.valuefn.tag()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|s| s == symbol)
    }

    /// Outgoing transitions of `state` on `symbol`.
    pub fn successors(&self, state: usize, symbol: usize) -> &[Transition] {
        let k = self.alphabet.len();
        let i = state * k + symbol;
        &self.transitions[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Indices into [`transitions`](Self::transitions) of `successors(state, symbol)`.
    pub fn successor_range(&self, state: usize, symbol: usize) -> std::ops::Range<usize> {
        let i = state * self.alphabet.len() + symbol;
        self.offsets[i]..self.offsets[i + 1]
    }

    /// All outgoing transitions of `state`.
    pub fn outgoing(&self, state: usize) -> &[Transition] {
        let k = self.alphabet.len();
        &self.transitions[self.offsets[state * k]..self.offsets[(state + 1) * k]]
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        if valid_name(&name) {
            self.name = name;
        }
        self
    }

    pub fn with_provenance(mut self, note: impl Into<String>) -> Self {
        let note: String = note.into();
        self.provenance = Some(note.replace('\n', " "));
        self
    }

    /// Replaces every weight by `f(weight)`, keeping the skeleton.
    pub fn map_weights(&self, mut f: impl FnMut(&Transition) -> Rational) -> Self {
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                weight: f(t),
                ..t.clone()
            })
            .collect();
        let mut out = WeightedAutomaton::new(
            self.name.clone(),
            self.alphabet.clone(),
            self.num_states,
            self.initial,
            self.valuefn.clone(),
            transitions,
        )
        .expect("skeleton unchanged");
        out.provenance = self.provenance.clone();
        out
    }

    pub fn with_valuefn(&self, valuefn: ValueFunction) -> Self {
        let mut out = self.clone();
        out.valuefn = valuefn;
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let k = self.alphabet.len();
        let mut missing = Vec::new();
        let mut deterministic = true;
        for q in 0..self.num_states {
            for s in 0..k {
                let succ = self.successors(q, s);
                match succ.len() {
                    0 => missing.push((q, self.alphabet[s].clone())),
                    1 => {}
                    _ => deterministic = false,
                }
            }
        }
        let lambda_out_of_range = match &self.valuefn {
            ValueFunction::Disc(l) if !(l.is_positive() && *l < Rational::one()) => Some(l.clone()),
            _ => None,
        };
        let reach = self.reachable_states();
        let unreachable = (0..self.num_states).filter(|&q| !reach[q]).collect();
        ValidationReport {
            missing,
            deterministic: deterministic && self.missing_free_hint(),
            lambda_out_of_range,
            unreachable,
        }
    }

    fn missing_free_hint(&self) -> bool {
        let k = self.alphabet.len();
        (0..self.num_states * k).all(|i| self.offsets[i + 1] > self.offsets[i])
    }

    /// Rejects automata that are not total or carry an invalid discount factor.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if let Some((q, s)) = report.missing.first() {
            return Err(Error::InvalidAutomaton(format!(
                "`{}` is not total: no transition from state {q} on `{s}`",
                self.name
            )));
        }
        if let Some(l) = report.lambda_out_of_range {
            return Err(Error::InvalidAutomaton(format!("discount factor {l} outside (0, 1)")));
        }
        Ok(())
    }

    /// True iff every `(q, σ)` has exactly one outgoing transition.
    pub fn is_deterministic(&self) -> Result<bool> {
        self.ensure_valid()?;
        Ok(self.is_deterministic_unchecked())
    }

    pub(crate) fn is_deterministic_unchecked(&self) -> bool {
        let k = self.alphabet.len();
        (0..self.num_states).all(|q| {
            (0..k).all(|s| {
                let succ = self.successors(q, s);
                succ.len() == 1
            })
        })
    }

    pub fn reachable_states(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            for t in self.outgoing(q) {
                if !seen[t.dst] {
                    seen[t.dst] = true;
                    queue.push_back(t.dst);
                }
            }
        }
        seen
    }

    /// Distinct weights in ascending order.
    pub fn weight_set(&self) -> Vec<Rational> {
        let mut ws: Vec<Rational> = self.transitions.iter().map(|t| t.weight.clone()).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    /// Keeps, for each `(src, symbol, dst)`, only the largest weight.
    /// This never changes the language.
    pub fn normalize_duplicates(&self) -> Self {
        let mut kept: Vec<Transition> = Vec::with_capacity(self.transitions.len());
        for t in &self.transitions {
            match kept.last_mut() {
                Some(last) if (last.src, last.symbol, last.dst) == (t.src, t.symbol, t.dst) => {
                    // sorted ascending by weight, so the later one wins
                    last.weight = t.weight.clone();
                }
                _ => kept.push(t.clone()),
            }
        }
        let mut out = self.clone();
        out.transitions = kept;
        WeightedAutomaton::new(
            out.name,
            out.alphabet,
            out.num_states,
            out.initial,
            out.valuefn,
            out.transitions,
        )
        .map(|mut a| {
            a.provenance = self.provenance.clone();
            a
        })
        .expect("skeleton unchanged")
    }

    /// Automaton for `c + L`.
    ///
    /// Sum and Disc automata get a fresh copy of the initial state whose
    /// outgoing weights carry `+c`; every other class adds `c` to all weights.
    pub fn shift(&self, c: &Rational) -> Result<Self> {
        self.ensure_valid()?;
        match self.tag() {
            Tag::Sum | Tag::Disc => {
                let fresh = self.num_states;
                let mut transitions = self.transitions.clone();
                for t in self.outgoing(self.initial) {
                    transitions.push(Transition {
                        src: fresh,
                        symbol: t.symbol,
                        dst: t.dst,
                        weight: &t.weight + c,
                    });
                }
                let mut out = WeightedAutomaton::new(
                    self.name.clone(),
                    self.alphabet.clone(),
                    self.num_states + 1,
                    fresh,
                    self.valuefn.clone(),
                    transitions,
                )?;
                out.provenance = self.provenance.clone();
                Ok(out)
            }
            _ => Ok(self.map_weights(|t| &t.weight + c)),
        }
    }

    /// Automaton for `c · L`, `c ≥ 0`.
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        self.ensure_valid()?;
        if c.is_negative() {
            return Err(Error::precondition(format!(
                "scale factor {c} is negative; only non-negative scaling is closed"
            )));
        }
        Ok(self.map_weights(|t| &t.weight * c))
    }
}

/// Outcome of [`WeightedAutomaton::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// `(state, symbol)` pairs without any outgoing transition.
    pub missing: Vec<(usize, String)>,
    pub deterministic: bool,
    pub lambda_out_of_range: Option<Rational>,
    /// Informational only.
    pub unreachable: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing.is_empty() && self.lambda_out_of_range.is_none()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "valid: {}", self.is_valid())?;
        writeln!(f, "deterministic: {}", self.deterministic)?;
        for (q, s) in &self.missing {
            writeln!(f, "missing: state {q} on `{s}`")?;
        }
        if let Some(l) = &self.lambda_out_of_range {
            writeln!(f, "discount factor out of range: {l}")?;
        }
        if !self.unreachable.is_empty() {
            let list: Vec<String> = self.unreachable.iter().map(|q| q.to_string()).collect();
            writeln!(f, "unreachable states: {}", list.join(" "))?;
        }
        Ok(())
    }
}

/// Convenience builder used by fixtures and tests.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    name: String,
    alphabet: Vec<String>,
    states: usize,
    initial: usize,
    valuefn: ValueFunction,
    transitions: Vec<(usize, String, usize, Rational)>,
}

impl AutomatonBuilder {
    pub fn states(mut self, n: usize) -> Self {
        self.states = n;
        self
    }

    pub fn initial(mut self, q: usize) -> Self {
        self.initial = q;
        self
    }

    pub fn trans(mut self, src: usize, symbol: &str, dst: usize, weight: impl Into<Weight>) -> Self {
        self.transitions.push((src, symbol.to_string(), dst, weight.into().0));
        self
    }

    pub fn build(self) -> Result<WeightedAutomaton> {
        let mut ts = Vec::with_capacity(self.transitions.len());
        for (src, sym, dst, weight) in self.transitions {
            let symbol = self
                .alphabet
                .iter()
                .position(|s| *s == sym)
                .ok_or(Error::UnknownSymbol(sym))?;
            ts.push(Transition {
                src,
                symbol,
                dst,
                weight,
            });
        }
        WeightedAutomaton::new(self.name, self.alphabet, self.states, self.initial, self.valuefn, ts)
    }
}

/// Weight literal accepted by [`AutomatonBuilder::trans`].
pub struct Weight(pub Rational);

impl From<Rational> for Weight {
    fn from(r: Rational) -> Self {
        Weight(r)
    }
}

impl From<&Rational> for Weight {
    fn from(r: &Rational) -> Self {
        Weight(r.clone())
    }
}

impl From<i64> for Weight {
    fn from(n: i64) -> Self {
        Weight(Rational::integer(n))
    }
}

impl From<&str> for Weight {
    fn from(s: &str) -> Self {
        Weight(s.parse().expect("weight literal"))
    }
}
