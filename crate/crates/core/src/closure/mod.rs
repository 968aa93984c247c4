//! Closure of automaton classes under max, min, sum and complement.

mod buchi;
mod determinize;
mod product;

use std::fmt;

pub use buchi::{complement_nbw, complement_nbw_with, reduce_buchi, threshold_nbw, BuchiAutomaton};
pub use determinize::{determinize_last, determinize_liminf, determinize_liminf_with};

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};

/// Value-function tag together with determinism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AutomatonClass {
    pub tag: Tag,
    pub deterministic: bool,
}

impl AutomatonClass {
    pub fn new(tag: Tag, deterministic: bool) -> Self {
        AutomatonClass { tag, deterministic }
    }

    /// Class of a valid automaton.
    pub fn of(aut: &WeightedAutomaton) -> Result<Self> {
        Ok(AutomatonClass::new(aut.tag(), aut.is_deterministic()?))
    }

    pub fn all() -> Vec<AutomatonClass> {
        Tag::ALL
            .into_iter()
            .flat_map(|t| [AutomatonClass::new(t, true), AutomatonClass::new(t, false)])
            .collect()
    }
}

impl fmt::Display for AutomatonClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.deterministic {
            "deterministic"
        } else {
            "nondeterministic"
        };
        write!(f, "{kind} {}", self.tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Max,
    Min,
    Sum,
    Complement,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::Max, Operator::Min, Operator::Sum, Operator::Complement];

    pub fn is_binary(self) -> bool {
        self != Operator::Complement
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Max => "max",
            Operator::Min => "min",
            Operator::Sum => "sum",
            Operator::Complement => "complement",
        })
    }
}

impl std::str::FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "max" => Ok(Operator::Max),
            "min" => Ok(Operator::Min),
            "sum" => Ok(Operator::Sum),
            "complement" | "comp" => Ok(Operator::Complement),
            other => Err(format!("unknown operator `{other}`")),
        }
    }
}

/// Entry of the closure table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub closed: bool,
    /// Construction used when closed, or the reason when not.
    pub construction: &'static str,
    pub cost: &'static str,
    pub citation: &'static str,
}

const fn yes(construction: &'static str, cost: &'static str, citation: &'static str) -> ClosureVerdict {
    ClosureVerdict {
        closed: true,
        construction,
        cost,
        citation,
    }
}

const fn no(citation: &'static str) -> ClosureVerdict {
    ClosureVerdict {
        closed: false,
        construction: "none",
        cost: "-",
        citation,
    }
}

const UNION: &str = "initial nondeterministic choice";

/// Closure verdict for `op` on `class`.
pub fn closure_table(class: AutomatonClass, op: Operator) -> ClosureVerdict {
    use Tag::*;
    let det = class.deterministic;
    match (class.tag, op) {
        // finite words
        (Max, Operator::Max) | (Last, Operator::Max) if det => {
            yes("synchronized product, max weight", "O(n1*n2)", "Theorem 8")
        }
        (Max | Last, Operator::Max) => yes(UNION, "O(n1+n2)", "Theorem 8"),
        (Tag::Sum, Operator::Max) if det => no("Theorem 8"),
        (Tag::Sum, Operator::Max) => yes(UNION, "O(n1+n2)", "Theorem 8"),
        (Max, Operator::Min) => yes("running-maxima product, min weight", "O(n1*m1*n2*m2)", "Theorem 9"),
        (Last, Operator::Min) => yes("synchronized product, min weight", "O(n1*n2)", "Theorem 9"),
        (Tag::Sum, Operator::Min) => no("Theorem 9"),
        (Max, Operator::Complement) => no("Theorem 10"),
        (Last | Tag::Sum, Operator::Complement) if det => yes("negated weights shifted by 1", "O(n)", "Theorem 10"),
        (Last, Operator::Complement) => yes("subset construction, then negation", "O(2^n)", "Theorem 10"),
        (Tag::Sum, Operator::Complement) => no("Theorem 10"),
        (Max, Operator::Sum) => yes("running-maxima product, summed weights", "O(n1*m1*n2*m2)", "Theorem 11"),
        (Last | Tag::Sum, Operator::Sum) => yes("synchronized product, summed weights", "O(n1*n2)", "Theorem 11"),

        // infinite words: max
        (Sup | LimSup, Operator::Max) if det => yes("synchronized product, max weight", "O(n1*n2)", "Theorem 12"),
        (LimInf, Operator::Max) if det => yes(
            "initial nondeterministic choice, then breakpoint determinization",
            "O((m1+m2)*2^(n1+n2))",
            "Theorem 12",
        ),
        (LimAvg | Disc, Operator::Max) if det => no("Theorem 13"),
        (Sup | LimSup | LimInf | LimAvg | Disc, Operator::Max) => yes(UNION, "O(n1+n2)", "Theorem 12"),

        // min
        (Sup, Operator::Min) => yes("running-maxima product, min weight", "O(n1*m1*n2*m2)", "Theorem 14"),
        (LimInf, Operator::Min) => yes("synchronized product, min weight", "O(n1*n2)", "Theorem 15"),
        (LimSup, Operator::Min) if det => yes(
            "product of per-threshold copy switchers",
            "O(n1*n2*2^(m1+m2))",
            "Theorem 16",
        ),
        (LimSup, Operator::Min) => yes(
            "guessed threshold with alternating index",
            "O(n1*n2*(m1+m2))",
            "Theorem 15",
        ),
        (LimAvg, Operator::Min) => no("Theorem 17"),
        (Disc, Operator::Min) => no("Theorem 18"),

        // complement
        (Sup | LimInf, Operator::Complement) => no("Theorem 19"),
        (LimSup, Operator::Complement) if det => no("Theorem 19"),
        (LimSup, Operator::Complement) => yes(
            "threshold Buchi slices, rank-based complementation, max",
            "O(m*2^(n log n))",
            "Theorem 20",
        ),
        (Disc, Operator::Complement) if det => yes("weights v to 1-lambda-v", "O(n)", "Theorem 21"),
        (LimAvg, Operator::Complement) if det => no("Theorem 22"),
        (LimAvg | Disc, Operator::Complement) => no("Theorem 23"),

        // sum
        (Sup, Operator::Sum) => yes("running-maxima product, summed weights", "O(n1*m1*n2*m2)", "Theorem 24"),
        (LimSup, Operator::Sum) if det => yes(
            "product with one bit per weight pair",
            "O(n1*n2*2^(m1*m2))",
            "Theorem 26",
        ),
        (LimSup, Operator::Sum) => yes(
            "guessed weight pair with alternating bit",
            "O(n1*m1*n2*m2)",
            "Theorem 25",
        ),
        (LimInf, Operator::Sum) if det => yes(
            "product with one bit per weight pair",
            "O(n1*n2*2^(m1*m2))",
            "Theorem 27",
        ),
        (LimInf, Operator::Sum) => yes(
            "breakpoint determinization, then product with one bit per weight pair",
            "O(n1*n2*2^(m1*m2)) after determinization",
            "Theorem 27",
        ),
        (Disc, Operator::Sum) => yes("synchronized product, summed weights", "O(n1*n2)", "Theorem 28"),
        (LimAvg, Operator::Sum) => no("Theorem 29"),
    }
}

/// How the class of the inputs is determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Deterministic iff every input is deterministic.
    #[default]
    Auto,
    /// Treat deterministic inputs as members of the nondeterministic class.
    Nondeterministic,
}

/// Size limits for the exponential constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of states of any constructed automaton.
    pub max_states: usize,
    /// Maximum input size for Buchi complementation and LimInf determinization.
    pub max_input_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 500_000,
            max_input_states: 8,
        }
    }
}

/// Result of a closure operation.
#[derive(Debug, Clone)]
pub struct Construction {
    pub automaton: WeightedAutomaton,
    pub verdict: ClosureVerdict,
    pub class: AutomatonClass,
}

pub fn op_max(a1: &WeightedAutomaton, a2: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    compose(Operator::Max, a1, Some(a2), Mode::Auto).map(|c| c.automaton)
}

pub fn op_min(a1: &WeightedAutomaton, a2: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    compose(Operator::Min, a1, Some(a2), Mode::Auto).map(|c| c.automaton)
}

pub fn op_sum(a1: &WeightedAutomaton, a2: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    compose(Operator::Sum, a1, Some(a2), Mode::Auto).map(|c| c.automaton)
}

pub fn complement(a: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    compose(Operator::Complement, a, None, Mode::Auto).map(|c| c.automaton)
}

pub fn compose(
    op: Operator,
    a1: &WeightedAutomaton,
    a2: Option<&WeightedAutomaton>,
    mode: Mode,
) -> Result<Construction> {
    compose_with(op, a1, a2, mode, &Limits::default())
}

/// Applies `op`, checking the closure table first.
pub fn compose_with(
    op: Operator,
    a1: &WeightedAutomaton,
    a2: Option<&WeightedAutomaton>,
    mode: Mode,
    limits: &Limits,
) -> Result<Construction> {
    a1.ensure_valid()?;
    let a2 = match (op.is_binary(), a2) {
        (true, Some(b)) => {
            b.ensure_valid()?;
            Some(align(a1, b)?)
        }
        (true, None) => return Err(Error::precondition(format!("{op} needs two automata"))),
        (false, Some(_)) => return Err(Error::precondition("complement takes one automaton")),
        (false, None) => None,
    };
    let deterministic = mode == Mode::Auto
        && a1.is_deterministic_unchecked()
        && a2.as_ref().is_none_or(|b| b.is_deterministic_unchecked());
    let class = AutomatonClass::new(a1.tag(), deterministic);
    let verdict = closure_table(class, op);
    if !verdict.closed {
        return Err(Error::ClosedUnderOpViolation {
            class,
            op,
            citation: verdict.citation,
        });
    }
    let out = match (op, a2.as_ref()) {
        (Operator::Complement, None) => complement_impl(a1, class, limits)?,
        (_, Some(b)) => binary_impl(op, a1, b, class, limits)?,
        _ => unreachable!(),
    };
    let name = match a2.as_ref() {
        Some(b) => format!("{op}({},{})", a1.name(), b.name()),
        None => format!("{op}({})", a1.name()),
    };
    let automaton = out.with_name(name).with_provenance(format!(
        "{}; {}; cost {}",
        verdict.construction, verdict.citation, verdict.cost
    ));
    Ok(Construction {
        automaton,
        verdict,
        class,
    })
}

/// Reorders `b`'s alphabet to match `a`'s and checks the value functions agree.
fn align(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    if a.valuefn() != b.valuefn() {
        return Err(match (a.valuefn(), b.valuefn()) {
            (ValueFunction::Disc(l1), ValueFunction::Disc(l2)) => {
                Error::Mismatch(format!("unequal discount factors {l1} and {l2}"))
            }
            (x, y) => Error::Mismatch(format!("value functions differ: {x} and {y}")),
        });
    }
    let mut sa: Vec<&String> = a.alphabet().iter().collect();
    let mut sb: Vec<&String> = b.alphabet().iter().collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Err(Error::Mismatch("alphabets differ".into()));
    }
    if a.alphabet() == b.alphabet() {
        return Ok(b.clone());
    }
    let remap: Vec<usize> = b
        .alphabet()
        .iter()
        .map(|s| a.symbol_index(s).expect("same symbol set"))
        .collect();
    let transitions = b
        .transitions()
        .iter()
        .map(|t| crate::automaton::Transition {
            symbol: remap[t.symbol],
            ..t.clone()
        })
        .collect();
    WeightedAutomaton::new(
        b.name(),
        a.alphabet().to_vec(),
        b.num_states(),
        b.initial(),
        b.valuefn().clone(),
        transitions,
    )
}

fn binary_impl(
    op: Operator,
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
    class: AutomatonClass,
    limits: &Limits,
) -> Result<WeightedAutomaton> {
    use Tag::*;
    let det = class.deterministic;
    let cap = limits.max_states;
    let max = |x: &Rational, y: &Rational| x.clone().max_of(y.clone());
    let min = |x: &Rational, y: &Rational| x.clone().min_of(y.clone());
    let add = |x: &Rational, y: &Rational| x + y;
    match (op, class.tag) {
        (Operator::Max, Max | Last | Sup | LimSup) if det => product::synchronized(a, b, cap, max),
        (Operator::Max, LimInf) if det => {
            let u = product::union(a, b)?;
            determinize_liminf_with(&u, limits)
        }
        (Operator::Max, _) => product::union(a, b),
        (Operator::Min, Max | Sup) => product::running_max(a, b, cap, min),
        (Operator::Min, Last | LimInf) => product::synchronized(a, b, cap, min),
        (Operator::Min, LimSup) if det => product::dlsup_min(a, b, cap),
        (Operator::Min, LimSup) => product::nlsup_min(a, b, cap),
        (Operator::Sum, Max | Sup) => product::running_max(a, b, cap, add),
        (Operator::Sum, Last | Tag::Sum | Disc) => product::synchronized(a, b, cap, add),
        (Operator::Sum, LimSup) if det => product::dlsup_sum(a, b, cap),
        (Operator::Sum, LimSup) => product::nlsup_sum(a, b, cap),
        (Operator::Sum, LimInf) => {
            let da = if det {
                a.clone()
            } else {
                determinize_liminf_with(a, limits)?
            };
            let db = if det {
                b.clone()
            } else {
                determinize_liminf_with(b, limits)?
            };
            product::dliminf_sum(&da, &db, cap)
        }
        _ => unreachable!("closure table and dispatch disagree on {op} for {class}"),
    }
}

fn complement_impl(a: &WeightedAutomaton, class: AutomatonClass, limits: &Limits) -> Result<WeightedAutomaton> {
    match (class.tag, class.deterministic) {
        (Tag::Disc, true) => {
            let lambda = a.valuefn().lambda().expect("Disc carries lambda").clone();
            let one_minus = Rational::one() - &lambda;
            Ok(a.map_weights(|t| &one_minus - &t.weight))
        }
        (Tag::Last | Tag::Sum, true) => a.map_weights(|t| -t.weight.clone()).shift(&Rational::one()),
        (Tag::Last, false) => {
            let d = determinize_last(a, limits)?;
            d.map_weights(|t| -t.weight.clone()).shift(&Rational::one())
        }
        (Tag::LimSup, false) => complement_nlsup(a, limits),
        _ => unreachable!("closure table and dispatch disagree on complement for {class}"),
    }
}

/// `1 − L_A` for a nondeterministic LimSup automaton.
///
/// For each weight `v_i` above the minimum, the Buchi slice "some run sees
/// weights ≥ v_i infinitely often" is complemented; its accepting edges get
/// `−v_{i−1}` and the others `−v_n`. The max of these automata is `−L_A`,
/// which is then shifted by 1.
fn complement_nlsup(a: &WeightedAutomaton, limits: &Limits) -> Result<WeightedAutomaton> {
    let vs = a.weight_set();
    let n = vs.len();
    if n == 1 {
        let value = Rational::one() - &vs[0];
        let transitions = (0..a.alphabet().len())
            .map(|s| crate::automaton::Transition {
                src: 0,
                symbol: s,
                dst: 0,
                weight: value.clone(),
            })
            .collect();
        return WeightedAutomaton::new(
            a.name(),
            a.alphabet().to_vec(),
            1,
            0,
            ValueFunction::LimSup,
            transitions,
        );
    }
    let mut acc: Option<WeightedAutomaton> = None;
    for i in 1..n {
        let slice = reduce_buchi(&threshold_nbw(a, &vs[i])?)?;
        let comp = complement_nbw_with(&slice, limits)?;
        let hi = -vs[i - 1].clone();
        let lo = -vs[n - 1].clone();
        let b = comp
            .automaton()
            .map_weights(|t| if t.weight.is_one() { hi.clone() } else { lo.clone() });
        acc = Some(match acc {
            None => b,
            Some(prev) => product::union(&prev, &b)?,
        });
    }
    acc.expect("n >= 2").shift(&Rational::one())
}
