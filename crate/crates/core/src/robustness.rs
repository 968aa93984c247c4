//! ε-approximations, robustness bounds, cut-point stability and the
//! reduction of [0,1]-weighted LimAvg automata to boolean weights.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::eval::eval_lasso;
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};
use crate::word::LassoWord;

/// Perturbation deltas are `ε·k/DELTA_STEPS` for `k ∈ [−DELTA_STEPS, DELTA_STEPS]`.
pub const DELTA_STEPS: i64 = 64;

/// Same skeleton with every weight moved by a seed-determined amount in
/// `[−ε, ε]`.
pub fn perturb(aut: &WeightedAutomaton, epsilon: &Rational, seed: u64) -> Result<WeightedAutomaton> {
    if epsilon.is_negative() {
        return Err(Error::precondition(format!("perturbation bound {epsilon} is negative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = epsilon / &Rational::integer(DELTA_STEPS);
    Ok(aut.map_weights(|t| {
        let k = rng.random_range(-DELTA_STEPS..=DELTA_STEPS);
        &t.weight + &(&step * &Rational::integer(k))
    }))
}

/// Uniform bound on `|L_A(w) − L_B(w)|` when `B` is an ε-approximation of `A`.
pub fn robustness_bound(valuefn: &ValueFunction, epsilon: &Rational) -> Result<Rational> {
    if epsilon.is_negative() {
        return Err(Error::precondition(format!("perturbation bound {epsilon} is negative")));
    }
    match valuefn {
        ValueFunction::Sup | ValueFunction::LimSup | ValueFunction::LimInf | ValueFunction::LimAvg => {
            Ok(epsilon.clone())
        }
        ValueFunction::Disc(lambda) => Ok(epsilon / &(Rational::one() - lambda)),
        other => Err(Error::WrongSemantics {
            operation: "robustness bound",
            expected: "an infinite-word value function",
            found: other.to_string(),
        }),
    }
}

fn skeleton(aut: &WeightedAutomaton) -> BTreeSet<(usize, usize, usize)> {
    aut.transitions().iter().map(|t| (t.src, t.symbol, t.dst)).collect()
}

/// Largest `|L_A(w) − L_B(w)|` over `words`; `B` must share `A`'s skeleton.
pub fn check_robustness(a: &WeightedAutomaton, b: &WeightedAutomaton, words: &[LassoWord]) -> Result<Rational> {
    if a.num_states() != b.num_states()
        || a.initial() != b.initial()
        || a.alphabet() != b.alphabet()
        || a.valuefn() != b.valuefn()
        || skeleton(a) != skeleton(b)
    {
        return Err(Error::Mismatch(format!(
            "`{}` and `{}` do not share a skeleton",
            a.name(),
            b.name()
        )));
    }
    let mut worst = Rational::zero();
    for w in words {
        let d = (eval_lasso(a, w)?.value - eval_lasso(b, w)?.value).abs();
        worst = worst.max_of(d);
    }
    Ok(worst)
}

/// Outcome of a sampled cut-point stability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stability {
    NoViolationFound,
    Counterexample {
        word: LassoWord,
        original: Rational,
        perturbed: Rational,
    },
}

impl Stability {
    pub fn holds(&self) -> bool {
        matches!(self, Stability::NoViolationFound)
    }
}

/// Compares `L_A^{≥η}` and `L_B^{≥η}` on `words`, with `B = perturb(A, ε, seed)`.
pub fn check_cutpoint_stability(
    aut: &WeightedAutomaton,
    eta: &Rational,
    epsilon: &Rational,
    seed: u64,
    words: &[LassoWord],
) -> Result<Stability> {
    let b = perturb(aut, epsilon, seed)?;
    for w in words {
        let original = eval_lasso(aut, w)?.value;
        let perturbed = eval_lasso(&b, w)?.value;
        if (original >= *eta) != (perturbed >= *eta) {
            return Ok(Stability::Counterexample {
                word: w.clone(),
                original,
                perturbed,
            });
        }
    }
    Ok(Stability::NoViolationFound)
}

/// Records how [`booleanize_limavg`] numbered its states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanizationCertificate {
    /// Least `n` with every weight of the form `e/n`.
    pub n_a: usize,
    /// `state_map[q'] = (q, i)`: source state and remainder `i ∈ [0, n_A)`.
    pub state_map: Vec<(usize, usize)>,
}

/// LimAvg automaton with weights in {0, 1} and the same language.
///
/// States are pairs `(q, i)` where `i/n_A` is the fractional mass carried
/// over. A transition of weight `v = e/n_A` from remainder `i` emits 1 and
/// moves to `i + e − n_A` when `i + e ≥ n_A`, and emits 0 and moves to
/// `i + e` otherwise.
pub fn booleanize_limavg(aut: &WeightedAutomaton) -> Result<(WeightedAutomaton, BooleanizationCertificate)> {
    if aut.tag() != Tag::LimAvg {
        return Err(Error::WrongSemantics {
            operation: "booleanization",
            expected: "LimAvg",
            found: aut.valuefn().to_string(),
        });
    }
    aut.ensure_valid()?;
    if let Some(t) = aut
        .transitions()
        .iter()
        .find(|t| t.weight.is_negative() || t.weight > Rational::one())
    {
        return Err(Error::precondition(format!("weight {} is outside [0, 1]", t.weight)));
    }
    let n_big: BigInt = Rational::common_denominator(aut.transitions().iter().map(|t| &t.weight));
    let n_a = n_big
        .to_usize()
        .filter(|&n| n.saturating_mul(aut.num_states()) <= 1 << 24)
        .ok_or(Error::CapExceeded {
            what: "booleanization states",
            size: usize::MAX,
            limit: 1 << 24,
        })?;
    let id = |q: usize, i: usize| q * n_a + i;
    let mut ts = Vec::with_capacity(aut.transitions().len() * n_a);
    for t in aut.transitions() {
        let e = t.weight.scaled_integer(&n_big).to_usize().expect("0 ≤ e ≤ n_A");
        for i in 0..n_a {
            let (dst, w) = if i + e >= n_a {
                (id(t.dst, i + e - n_a), Rational::one())
            } else {
                (id(t.dst, i + e), Rational::zero())
            };
            ts.push(Transition {
                src: id(t.src, i),
                symbol: t.symbol,
                dst,
                weight: w,
            });
        }
    }
    let out = WeightedAutomaton::new(
        format!("{}_bool", aut.name()),
        aut.alphabet().to_vec(),
        aut.num_states() * n_a,
        id(aut.initial(), 0),
        ValueFunction::LimAvg,
        ts,
    )?;
    let state_map = (0..aut.num_states())
        .flat_map(|q| (0..n_a).map(move |i| (q, i)))
        .collect();
    Ok((out, BooleanizationCertificate { n_a, state_map }))
}

/// The one-state Disc automaton with an `a`-loop of weight `(1+λ)/2` and a
/// `b`-loop of weight 0, together with its two diagnostic words.
#[derive(Debug, Clone)]
pub struct GapWitness {
    pub automaton: WeightedAutomaton,
    /// `a·b^ω` with value `(1+λ)/2`, then `a^ω` with `(1+λ)/(2(1−λ))`.
    pub words: [(LassoWord, Rational); 2],
}

pub fn boolean_disc_gap_witness(lambda: &Rational) -> Result<GapWitness> {
    if !lambda.is_positive() || *lambda >= Rational::one() {
        return Err(Error::precondition(format!("discount factor {lambda} outside (0, 1)")));
    }
    let half = Rational::new(1, 2);
    let w = (Rational::one() + lambda) * &half;
    let automaton = WeightedAutomaton::builder("disc_gap_witness", &["a", "b"], ValueFunction::Disc(lambda.clone()))
        .trans(0, "a", 0, &w)
        .trans(0, "b", 0, 0)
        .build()?;
    let all_a = &w / &(Rational::one() - lambda);
    Ok(GapWitness {
        automaton,
        words: [
            (LassoWord::from_strs("a", "b")?, w),
            (LassoWord::from_strs("", "a")?, all_a),
        ],
    })
}
