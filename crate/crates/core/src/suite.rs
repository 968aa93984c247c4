//! Seeded property suites behind `quantlang check`.
//!
//! Trial `k` of a run with seed `s` draws everything from a ChaCha8 stream
//! `(s, k)`, so any failure replays from `(suite, seed, k)` alone.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::WeightedAutomaton;
use crate::closure::{closure_table, compose_with, AutomatonClass, Construction, Limits, Mode, Operator};
use crate::cutpoint::{
    certify_disc_margin, disc_tail, extract_dbw_limavg, extract_nbw_disc, limavg_isolation_check, limavg_scc_intervals,
};
use crate::error::Result;
use crate::eval::{eval, eval_lasso};
use crate::format::serialize;
use crate::gen::{self, Shape};
use crate::oracle::oracle_eval;
use crate::rational::Rational;
use crate::robustness::{check_cutpoint_stability, check_robustness, perturb, robustness_bound};
use crate::valuefn::{Tag, ValueFunction};
use crate::word::{LassoWord, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Closure,
    Robustness,
    Oracle,
    Cutpoint,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 4] = [
        SuiteKind::Closure,
        SuiteKind::Robustness,
        SuiteKind::Oracle,
        SuiteKind::Cutpoint,
    ];
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteKind::Closure => "closure",
            SuiteKind::Robustness => "robustness",
            SuiteKind::Oracle => "oracle",
            SuiteKind::Cutpoint => "cutpoint",
        })
    }
}

impl FromStr for SuiteKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected closure, robustness, oracle or cutpoint)"))
    }
}

/// Signature of [`compose_with`]; the closure suite calls whatever is
/// plugged in here, which lets tests inject a broken construction.
pub type ComposeFn =
    fn(Operator, &WeightedAutomaton, Option<&WeightedAutomaton>, Mode, &Limits) -> Result<Construction>;

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub compose: ComposeFn,
    /// Sampled words per trial.
    pub words: usize,
    pub threads: usize,
    pub limits: Limits,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            compose: compose_with,
            words: 20,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            limits: Limits::default(),
        }
    }
}

/// Inputs and values of a failed trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub note: String,
    /// Serialized input automata.
    pub inputs: Vec<String>,
    pub word: Option<String>,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub index: usize,
    pub label: String,
    pub failure: Option<Failure>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub seed: u64,
    pub trials: usize,
    pub outcomes: Vec<TrialOutcome>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &TrialOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }

    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(TrialOutcome::passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} seed {} trials {}", self.suite, self.seed, self.trials)?;
        for o in &self.outcomes {
            writeln!(f, "TRIAL {} {}", o.index, if o.passed() { "PASS" } else { "FAIL" })?;
        }
        for o in self.failures() {
            let x = o.failure.as_ref().expect("failed trial");
            writeln!(f, "failure in trial {} ({}): {}", o.index, o.label, x.note)?;
            if let Some(w) = &x.word {
                writeln!(f, "  word: {w}")?;
            }
            writeln!(f, "  expected: {}", x.expected)?;
            writeln!(f, "  actual: {}", x.actual)?;
            for (i, input) in x.inputs.iter().enumerate() {
                writeln!(f, "  input {}:", i + 1)?;
                for line in input.lines() {
                    writeln!(f, "    {line}")?;
                }
            }
            writeln!(
                f,
                "  replay: quantlang check --suite {} --seed {} --trials {}",
                self.suite,
                self.seed,
                o.index + 1
            )?;
        }
        let passed = self.outcomes.iter().filter(|o| o.passed()).count();
        write!(f, "passed {passed}/{} in {:.2?}", self.trials, self.elapsed)
    }
}

/// Random stream of trial `k`.
pub fn trial_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

pub fn run_suite(kind: SuiteKind, trials: usize, seed: u64) -> SuiteReport {
    run_suite_with(kind, trials, seed, &SuiteOptions::default())
}

/// Runs trials `0..trials` on worker threads; outcomes are ordered by index.
pub fn run_suite_with(kind: SuiteKind, trials: usize, seed: u64, opts: &SuiteOptions) -> SuiteReport {
    let start = Instant::now();
    let threads = opts.threads.clamp(1, trials.max(1));
    let mut outcomes: Vec<TrialOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                scope.spawn(move || {
                    (t..trials)
                        .step_by(threads)
                        .map(|k| run_trial(kind, seed, k, opts))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("suite worker"))
            .collect()
    });
    outcomes.sort_by_key(|o| o.index);
    SuiteReport {
        suite: kind,
        seed,
        trials,
        outcomes,
        elapsed: start.elapsed(),
    }
}

pub fn run_trial(kind: SuiteKind, seed: u64, k: usize, opts: &SuiteOptions) -> TrialOutcome {
    let mut rng = trial_rng(seed, k);
    let (label, result) = match kind {
        SuiteKind::Closure => {
            let cells = closure_cells();
            let (class, op) = cells[k % cells.len()];
            (format!("{class} {op}"), closure_trial(&mut rng, class, op, opts))
        }
        SuiteKind::Oracle => {
            let tag = Tag::INFINITE[k % Tag::INFINITE.len()];
            (format!("{tag} oracle"), oracle_trial(&mut rng, tag, opts))
        }
        SuiteKind::Robustness => {
            let tag = Tag::INFINITE[k % Tag::INFINITE.len()];
            (format!("{tag} robustness"), robustness_trial(&mut rng, tag, opts))
        }
        SuiteKind::Cutpoint => {
            if k.is_multiple_of(2) {
                (
                    "deterministic LimAvg cut-point".into(),
                    limavg_cutpoint_trial(&mut rng, opts),
                )
            } else {
                ("Disc cut-point".into(), disc_cutpoint_trial(&mut rng))
            }
        }
    };
    let failure = match result {
        Ok(f) => f,
        Err(e) => Some(Failure {
            note: "unexpected error".into(),
            inputs: Vec::new(),
            word: None,
            expected: "success".into(),
            actual: e.to_string(),
        }),
    };
    TrialOutcome {
        index: k,
        label,
        failure,
    }
}

type TrialResult = Result<Option<Failure>>;

fn fail(
    note: impl Into<String>,
    inputs: &[&WeightedAutomaton],
    word: Option<&dyn fmt::Display>,
    expected: impl fmt::Display,
    actual: impl fmt::Display,
) -> Option<Failure> {
    Some(Failure {
        note: note.into(),
        inputs: inputs.iter().map(|a| serialize(a)).collect(),
        word: word.map(|w| w.to_string()),
        expected: expected.to_string(),
        actual: actual.to_string(),
    })
}

/// Every closed cell of the closure table.
pub fn closure_cells() -> Vec<(AutomatonClass, Operator)> {
    AutomatonClass::all()
        .into_iter()
        .flat_map(|c| Operator::ALL.into_iter().map(move |op| (c, op)))
        .filter(|&(c, op)| closure_table(c, op).closed)
        .collect()
}

/// Cells whose construction is exponential in states or weights; these
/// are sampled with at most 3 states and 2 distinct weights.
pub fn is_exponential_cell(class: AutomatonClass, op: Operator) -> bool {
    use Tag::*;
    matches!(
        (class.tag, class.deterministic, op),
        (LimSup, true, Operator::Min | Operator::Sum)
            | (LimInf, true, Operator::Max | Operator::Sum)
            | (LimInf, false, Operator::Sum)
            | (LimSup, false, Operator::Complement)
            | (Last, false, Operator::Complement)
    )
}

/// Shape used by the closure suite for `class` and `op`.
pub fn cell_shape<R: Rng>(rng: &mut R, class: AutomatonClass, op: Operator) -> Shape {
    let valuefn = match class.tag {
        Tag::Disc => ValueFunction::Disc(["1/2", "2/3"].choose(rng).unwrap().parse().unwrap()),
        t => ValueFunction::from_tag(t, None).expect("no parameter"),
    };
    let symbols = rng.random_range(2..=3);
    let mut weights = gen::default_weights();
    let max_states = if is_exponential_cell(class, op) {
        while weights.len() > 2 {
            let i = rng.random_range(0..weights.len());
            weights.remove(i);
        }
        3
    } else {
        5
    };
    Shape::new(valuefn, max_states, symbols, &weights).deterministic(class.deterministic)
}

fn random_word<R: Rng>(rng: &mut R, tag: Tag, symbols: usize) -> Word {
    if tag.is_finite_word() {
        Word::Finite(gen::random_finite(rng, symbols, 8))
    } else {
        Word::Lasso(gen::random_lasso(rng, symbols, 8))
    }
}

/// Largest state count the construction for a cell may produce.
pub fn cost_ceiling(
    class: AutomatonClass,
    op: Operator,
    a: &WeightedAutomaton,
    b: Option<&WeightedAutomaton>,
) -> Option<usize> {
    use Tag::*;
    let n1 = a.num_states();
    let m1 = a.weight_set().len();
    let (n2, m2) = b.map(|b| (b.num_states(), b.weight_set().len())).unwrap_or((0, 0));
    let det = class.deterministic;
    let joint = || {
        let mut all = a.weight_set();
        all.extend(b.map(|b| b.weight_set()).unwrap_or_default());
        all.sort();
        all.dedup();
        all.len()
    };
    let pow2 = |e: usize| 1usize.checked_shl(e as u32);
    match (op, class.tag) {
        (Operator::Max, Max | Last | Sup | LimSup) if det => Some(n1 * n2),
        (Operator::Max, LimInf) if det => None,
        (Operator::Max, _) => Some(1 + n1 + n2),
        (Operator::Min, Max | Sup) | (Operator::Sum, Max | Sup) => Some(n1 * m1 * n2 * m2),
        (Operator::Min, Last | LimInf) | (Operator::Sum, Last | Sum | Disc) => Some(n1 * n2),
        (Operator::Min, LimSup) if det => pow2(joint()).map(|p| n1 * n2 * p),
        (Operator::Min, LimSup) => Some(1 + n1 * n2 * 2 * joint()),
        (Operator::Sum, LimSup) if det => pow2(m1 * m2).map(|p| n1 * n2 * p),
        (Operator::Sum, LimSup) => Some(1 + n1 * n2 * 2 * m1 * m2),
        (Operator::Sum, LimInf) if det => pow2(m1 * m2).map(|p| n1 * n2 * p),
        (Operator::Complement, Disc | Last) if det => Some(n1),
        (Operator::Complement, Sum) => Some(n1 + 1),
        (Operator::Complement, Last) => pow2(n1),
        _ => None,
    }
}

fn apply(op: Operator, x: &Rational, y: &Rational) -> Rational {
    match op {
        Operator::Max => x.clone().max_of(y.clone()),
        Operator::Min => x.clone().min_of(y.clone()),
        Operator::Sum => x + y,
        Operator::Complement => Rational::one() - x,
    }
}

fn closure_trial(rng: &mut ChaCha8Rng, class: AutomatonClass, op: Operator, opts: &SuiteOptions) -> TrialResult {
    let shape = cell_shape(rng, class, op);
    let mode = if class.deterministic {
        Mode::Auto
    } else {
        Mode::Nondeterministic
    };
    let a = gen::random_automaton(rng, &shape);
    let b = op.is_binary().then(|| gen::random_automaton(rng, &shape));
    let mut inputs = vec![&a];
    inputs.extend(b.as_ref());
    let c = match (opts.compose)(op, &a, b.as_ref(), mode, &opts.limits) {
        Ok(c) => c.automaton,
        Err(e) => return Ok(fail("construction failed", &inputs, None, "an automaton", e)),
    };
    if class.deterministic && !c.is_deterministic()? {
        return Ok(fail(
            "deterministic construction produced a nondeterministic automaton",
            &inputs,
            None,
            "deterministic",
            "nondeterministic",
        ));
    }
    if let Some(ceiling) = cost_ceiling(class, op, &a, b.as_ref()) {
        if c.num_states() > ceiling {
            return Ok(fail(
                "state count above the cost ceiling",
                &inputs,
                None,
                ceiling,
                c.num_states(),
            ));
        }
    }
    let involution = match op {
        Operator::Complement if class.tag != Tag::LimSup => {
            Some((opts.compose)(op, &c, None, Mode::Auto, &opts.limits).map(|x| x.automaton)?)
        }
        _ => None,
    };
    for _ in 0..opts.words {
        let w = random_word(rng, class.tag, shape.symbols);
        let x = eval(&a, &w)?.value;
        let got = eval(&c, &w)?.value;
        let expected = match &b {
            Some(b) => apply(op, &x, &eval(b, &w)?.value),
            None => Rational::one() - &x,
        };
        if got != expected {
            return Ok(fail(format!("pointwise {op} law"), &inputs, Some(&w), expected, got));
        }
        if let Some(cc) = &involution {
            let back = eval(cc, &w)?.value;
            if back != x {
                return Ok(fail("complement is not an involution", &inputs, Some(&w), x, back));
            }
        }
    }
    if op == Operator::Complement && class.tag == Tag::Last {
        return de_morgan(rng, &a, &shape, mode, opts);
    }
    Ok(None)
}

/// `1 − max(A, B) = min(1 − A, 1 − B)` for Last automata.
fn de_morgan(
    rng: &mut ChaCha8Rng,
    a: &WeightedAutomaton,
    shape: &Shape,
    mode: Mode,
    opts: &SuiteOptions,
) -> TrialResult {
    let b = gen::random_automaton(rng, shape);
    let f = opts.compose;
    let lhs = f(
        Operator::Complement,
        &f(Operator::Max, a, Some(&b), mode, &opts.limits)?.automaton,
        None,
        mode,
        &opts.limits,
    )?
    .automaton;
    let ca = f(Operator::Complement, a, None, mode, &opts.limits)?.automaton;
    let cb = f(Operator::Complement, &b, None, mode, &opts.limits)?.automaton;
    let rhs = f(Operator::Min, &ca, Some(&cb), Mode::Auto, &opts.limits)?.automaton;
    for _ in 0..opts.words {
        let w = random_word(rng, Tag::Last, shape.symbols);
        let (l, r) = (eval(&lhs, &w)?.value, eval(&rhs, &w)?.value);
        if l != r {
            return Ok(fail("De Morgan law", &[a, &b], Some(&w), l, r));
        }
    }
    Ok(None)
}

fn random_valuefn<R: Rng>(rng: &mut R, tag: Tag) -> ValueFunction {
    match tag {
        Tag::Disc => ValueFunction::Disc(["1/2", "2/3", "1/3"].choose(rng).unwrap().parse().unwrap()),
        t => ValueFunction::from_tag(t, None).expect("no parameter"),
    }
}

fn oracle_trial(rng: &mut ChaCha8Rng, tag: Tag, opts: &SuiteOptions) -> TrialResult {
    let shape = Shape::new(random_valuefn(rng, tag), 4, 2, &gen::default_weights()).deterministic(rng.random_bool(0.3));
    let a = gen::random_automaton(rng, &shape);
    for _ in 0..opts.words {
        let w = gen::random_lasso(rng, 2, 8);
        let r = eval_lasso(&a, &w)?;
        let o = oracle_eval(&a, &w)?;
        if r.value != o {
            return Ok(fail("evaluator disagrees with the oracle", &[&a], Some(&w), o, r.value));
        }
        let replay = r.witness.replay(a.valuefn());
        if replay.as_ref() != Some(&r.value) {
            return Ok(fail(
                "witness replay differs from the value",
                &[&a],
                Some(&w),
                r.value,
                format!("{replay:?}"),
            ));
        }
    }
    Ok(None)
}

fn robustness_trial(rng: &mut ChaCha8Rng, tag: Tag, opts: &SuiteOptions) -> TrialResult {
    let det = tag == Tag::LimAvg || rng.random_bool(0.3);
    let shape = Shape::new(random_valuefn(rng, tag), 4, 2, &gen::default_weights()).deterministic(det);
    let a = gen::random_automaton(rng, &shape);
    let epsilon: Rational = ["1/10", "1/4", "1/3"].choose(rng).unwrap().parse().unwrap();
    let seed = rng.random::<u64>();
    let b = perturb(&a, &epsilon, seed)?;
    let words: Vec<LassoWord> = (0..opts.words).map(|_| gen::random_lasso(rng, 2, 8)).collect();
    let bound = robustness_bound(a.valuefn(), &epsilon)?;
    let dev = check_robustness(&a, &b, &words)?;
    if dev > bound {
        return Ok(fail(
            format!("deviation above the bound for ε = {epsilon}"),
            &[&a, &b],
            None,
            format!("≤ {bound}"),
            dev,
        ));
    }
    // cut-point stability with a margin above the bound
    let (eta, margin) = match tag {
        Tag::LimAvg => match isolated_eta(rng, &a)? {
            Some(x) => x,
            None => return Ok(None),
        },
        Tag::Disc => match certified_disc_eta(rng, &a)? {
            Some(x) => x,
            None => return Ok(None),
        },
        _ => return Ok(None),
    };
    let lambda_factor = robustness_bound(a.valuefn(), &Rational::one())?;
    // perturb so that the bound is half the margin
    let eps = &margin / &lambda_factor / Rational::integer(2);
    let stability = check_cutpoint_stability(&a, &eta, &eps, seed, &words)?;
    if !stability.holds() {
        return Ok(fail(
            format!("cut-point {eta} flipped under ε = {eps}"),
            &[&a],
            None,
            "no violation",
            format!("{stability:?}"),
        ));
    }
    Ok(None)
}

/// A threshold outside every reachable SCC interval and its margin.
pub fn isolated_eta<R: Rng>(rng: &mut R, a: &WeightedAutomaton) -> Result<Option<(Rational, Rational)>> {
    let intervals: Vec<_> = limavg_scc_intervals(a)?.into_iter().filter(|i| i.reachable).collect();
    let mut points: Vec<Rational> = intervals.iter().flat_map(|i| [i.m.clone(), i.big_m.clone()]).collect();
    points.sort();
    points.dedup();
    let half = Rational::new(1, 2);
    let mut candidates = vec![&points[0] - &half, points.last().unwrap() + &half];
    for w in points.windows(2) {
        candidates.push((&w[0] + &w[1]) * &half);
    }
    candidates.retain(|c| !intervals.iter().any(|i| i.contains(c)));
    let Some(eta) = candidates.choose(rng).cloned() else {
        return Ok(None);
    };
    let margin = limavg_isolation_check(a, &eta)?.margin.expect("isolated");
    Ok(Some((eta, margin)))
}

/// A threshold `η` on a 1/8 grid and a margin certified by
/// [`certify_disc_margin`], if one is found.
pub fn certified_disc_eta<R: Rng>(rng: &mut R, a: &WeightedAutomaton) -> Result<Option<(Rational, Rational)>> {
    for _ in 0..8 {
        let eta = Rational::new(rng.random_range(-2..=24), 8);
        for eps in ["1/4", "1/8"] {
            let eps: Rational = eps.parse().unwrap();
            if certify_disc_margin(a, &eta, &eps, 12)? {
                return Ok(Some((eta, eps)));
            }
        }
    }
    Ok(None)
}

fn limavg_cutpoint_trial(rng: &mut ChaCha8Rng, opts: &SuiteOptions) -> TrialResult {
    let shape = Shape::new(ValueFunction::LimAvg, 4, 2, &gen::default_weights()).deterministic(true);
    let a = gen::random_automaton(rng, &shape);
    let Some((eta, margin)) = isolated_eta(rng, &a)? else {
        return Ok(None);
    };
    let dbw = extract_dbw_limavg(&a, &eta)?;
    if !dbw.automaton().is_deterministic()? {
        return Ok(fail(
            "extracted Büchi automaton is nondeterministic",
            &[&a],
            None,
            "deterministic",
            "nondeterministic",
        ));
    }
    for _ in 0..opts.words.max(100) {
        let w = gen::random_lasso(rng, 2, 8);
        let v = eval_lasso(&a, &w)?.value;
        let member = dbw.accepts(&w)?;
        if member != (v >= eta) {
            return Ok(fail(
                format!("Büchi membership differs from value ≥ {eta}"),
                &[&a],
                Some(&w),
                v >= eta,
                member,
            ));
        }
        if (&v - &eta).abs() < margin {
            return Ok(fail(
                format!("value within the isolation margin {margin} of {eta}"),
                &[&a],
                Some(&w),
                "outside",
                v,
            ));
        }
    }
    Ok(None)
}

fn disc_cutpoint_trial(rng: &mut ChaCha8Rng) -> TrialResult {
    let shape = Shape::new(ValueFunction::Disc(Rational::new(1, 2)), 3, 2, &gen::default_weights())
        .deterministic(rng.random_bool(0.5));
    let a = gen::random_automaton(rng, &shape);
    let Some((eta, eps)) = certified_disc_eta(rng, &a)? else {
        return Ok(None);
    };
    let x = extract_nbw_disc(&a, &eta, &eps)?;
    let lambda = a.valuefn().lambda().unwrap();
    let big_v = a.transitions().iter().map(|t| t.weight.abs()).max().unwrap();
    let minimal = x.depth == 0 || disc_tail(&big_v, lambda, x.depth - 1) >= eps;
    if !(x.tail < eps && minimal) {
        return Ok(fail(
            "unfolding depth is not the least with u_n < ε",
            &[&a],
            None,
            "least n",
            x.depth,
        ));
    }
    for w in gen::all_lassos(2, 4) {
        let v = eval_lasso(&a, &w)?.value;
        let member = x.buchi.accepts(&w)?;
        if member != (v >= eta) {
            return Ok(fail(
                format!("Büchi membership differs from value ≥ {eta}"),
                &[&a],
                Some(&w),
                v >= eta,
                member,
            ));
        }
    }
    Ok(None)
}
