//! Invariants over random automata and words.

use proptest::prelude::*;
use quantlang::closure::{compose, Mode, Operator};
use quantlang::gen::{self, Shape};
use quantlang::oracle::oracle_eval;
use quantlang::robustness::{check_robustness, perturb, robustness_bound};
use quantlang::suite::trial_rng;
use quantlang::{eval, eval_lasso, format, LassoWord, Rational, Tag, ValueFunction, WeightedAutomaton, Word};

fn vf_for(tag: Tag, pick: u8) -> ValueFunction {
    match tag {
        Tag::Disc => ValueFunction::Disc(["1/2", "2/3", "1/3"][pick as usize % 3].parse().unwrap()),
        t => ValueFunction::from_tag(t, None).unwrap(),
    }
}

fn tag_strategy() -> impl Strategy<Value = Tag> {
    prop::sample::select(vec![
        Tag::Max,
        Tag::Last,
        Tag::Sum,
        Tag::Sup,
        Tag::LimSup,
        Tag::LimInf,
        Tag::LimAvg,
        Tag::Disc,
    ])
}

fn infinite_tag() -> impl Strategy<Value = Tag> {
    prop::sample::select(Tag::INFINITE.to_vec())
}

fn instance(tag: Tag, seed: u64, det: bool) -> (WeightedAutomaton, Vec<Word>) {
    let mut rng = trial_rng(seed, 0);
    let shape = Shape::new(vf_for(tag, seed as u8), 4, 2, &gen::default_weights()).deterministic(det);
    let a = gen::random_automaton(&mut rng, &shape);
    let words = (0..6)
        .map(|_| {
            if tag.is_finite_word() {
                Word::Finite(gen::random_finite(&mut rng, 2, 7))
            } else {
                Word::Lasso(gen::random_lasso(&mut rng, 2, 7))
            }
        })
        .collect();
    (a, words)
}

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(tag in tag_strategy(), seed in any::<u64>(), det in any::<bool>()) {
        let (a, _) = instance(tag, seed, det);
        let text = format::serialize(&a);
        let b = format::parse(&text).unwrap();
        prop_assert_eq!(format::serialize(&b), text);
        prop_assert_eq!(b, a);
    }

    #[test]
    fn witness_replays_to_the_value(tag in tag_strategy(), seed in any::<u64>()) {
        let (a, words) = instance(tag, seed, false);
        for w in &words {
            let res = eval(&a, w).unwrap();
            prop_assert_eq!(res.witness.replay(a.valuefn()), Some(res.value.clone()));
        }
    }

    #[test]
    fn shift_adds_a_constant(tag in tag_strategy(), seed in any::<u64>(), c in -6i64..=6, d in 1i64..=4) {
        let (a, words) = instance(tag, seed, seed % 2 == 0);
        let c = Rational::new(c, d);
        let b = a.shift(&c).unwrap();
        for w in &words {
            prop_assert_eq!(eval(&b, w).unwrap().value, &c + &eval(&a, w).unwrap().value);
        }
    }

    #[test]
    fn scale_multiplies(tag in tag_strategy(), seed in any::<u64>(), c in 0i64..=6, d in 1i64..=4) {
        let (a, words) = instance(tag, seed, seed % 2 == 1);
        let c = Rational::new(c, d);
        let b = a.scale(&c).unwrap();
        for w in &words {
            prop_assert_eq!(eval(&b, w).unwrap().value, &c * &eval(&a, w).unwrap().value);
        }
    }

    #[test]
    fn value_lies_in_the_weight_range(tag in infinite_tag(), seed in any::<u64>()) {
        let (a, words) = instance(tag, seed, false);
        let ws = a.weight_set();
        let (lo, hi) = (ws.first().unwrap().clone(), ws.last().unwrap().clone());
        let (lo, hi) = match a.valuefn().lambda() {
            Some(l) => {
                let f = Rational::one() / (Rational::one() - l);
                (&lo * &f, &hi * &f)
            }
            None => (lo, hi),
        };
        for w in &words {
            let v = eval(&a, w).unwrap().value;
            prop_assert!(lo <= v && v <= hi, "{} outside [{}, {}]", v, lo, hi);
        }
    }

    #[test]
    fn lasso_presentation_is_irrelevant(tag in infinite_tag(), seed in any::<u64>()) {
        let (a, words) = instance(tag, seed, false);
        for w in &words {
            let Word::Lasso(w) = w else { unreachable!() };
            let v = eval_lasso(&a, w).unwrap().value;
            let mut prefix = w.prefix().to_vec();
            prefix.push(w.period()[0].clone());
            let mut period = w.period()[1..].to_vec();
            period.push(w.period()[0].clone());
            let unrolled = LassoWord::new(prefix, period).unwrap();
            prop_assert_eq!(eval_lasso(&a, &unrolled).unwrap().value, v.clone());
            let doubled = LassoWord::new(w.prefix().to_vec(), [w.period(), w.period()].concat()).unwrap();
            prop_assert_eq!(eval_lasso(&a, &doubled).unwrap().value, v);
        }
    }

    #[test]
    fn union_is_pointwise_max(tag in infinite_tag(), seed in any::<u64>()) {
        let (a, words) = instance(tag, seed, false);
        let (b, _) = instance(tag, seed.wrapping_add(1), false);
        let b = b.with_valuefn(a.valuefn().clone());
        let m = compose(Operator::Max, &a, Some(&b), Mode::Nondeterministic).unwrap().automaton;
        for w in &words {
            let x = eval(&a, w).unwrap().value.max_of(eval(&b, w).unwrap().value);
            prop_assert_eq!(eval(&m, w).unwrap().value, x);
        }
    }

    #[test]
    fn perturbation_respects_the_bound(tag in infinite_tag(), seed in any::<u64>(), k in 1i64..=8) {
        let (a, words) = instance(tag, seed, false);
        let eps = Rational::new(k, 16);
        let b = perturb(&a, &eps, seed).unwrap();
        let lassos: Vec<LassoWord> = words.into_iter().map(|w| match w { Word::Lasso(l) => l, _ => unreachable!() }).collect();
        let d = check_robustness(&a, &b, &lassos).unwrap();
        prop_assert!(d <= robustness_bound(a.valuefn(), &eps).unwrap());
    }

    #[test]
    fn eval_matches_oracle_on_small_automata(tag in infinite_tag(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 1);
        let shape = Shape::new(vf_for(tag, seed as u8), 3, 2, &gen::default_weights());
        let a = gen::random_automaton(&mut rng, &shape);
        for _ in 0..4 {
            let w = gen::random_lasso(&mut rng, 2, 5);
            prop_assert_eq!(eval_lasso(&a, &w).unwrap().value, oracle_eval(&a, &w).unwrap());
        }
    }
}

#[test]
fn complement_of_complement_on_deterministic_disc() {
    let a = WeightedAutomaton::builder("d", &["a", "b"], ValueFunction::Disc(r("1/2")))
        .states(2)
        .trans(0, "a", 1, r("1/3"))
        .trans(0, "b", 0, 0)
        .trans(1, "a", 0, 1)
        .trans(1, "b", 1, r("1/2"))
        .build()
        .unwrap();
    let c = compose(Operator::Complement, &a, None, Mode::Auto).unwrap().automaton;
    let cc = compose(Operator::Complement, &c, None, Mode::Auto).unwrap().automaton;
    for w in gen::all_lassos(2, 4) {
        let v = eval_lasso(&a, &w).unwrap().value;
        assert_eq!(eval_lasso(&c, &w).unwrap().value, Rational::one() - &v);
        assert_eq!(eval_lasso(&cc, &w).unwrap().value, v);
    }
}
