//! Value functions aggregating a sequence of transition weights.

use std::fmt;
use std::str::FromStr;

use crate::rational::Rational;

/// Tag of a value function without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Last,
    Max,
    Sum,
    Sup,
    LimSup,
    LimInf,
    LimAvg,
    Disc,
}

impl Tag {
    pub fn is_finite_word(self) -> bool {
        matches!(self, Tag::Last | Tag::Max | Tag::Sum)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Tag::Last => "last",
            Tag::Max => "max",
            Tag::Sum => "sum",
            Tag::Sup => "sup",
            Tag::LimSup => "limsup",
            Tag::LimInf => "liminf",
            Tag::LimAvg => "limavg",
            Tag::Disc => "disc",
        }
    }

    pub const ALL: [Tag; 8] = [
        Tag::Last,
        Tag::Max,
        Tag::Sum,
        Tag::Sup,
        Tag::LimSup,
        Tag::LimInf,
        Tag::LimAvg,
        Tag::Disc,
    ];

    pub const INFINITE: [Tag; 5] = [Tag::Sup, Tag::LimSup, Tag::LimInf, Tag::LimAvg, Tag::Disc];
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tag::Last => "Last",
            Tag::Max => "Max",
            Tag::Sum => "Sum",
            Tag::Sup => "Sup",
            Tag::LimSup => "LimSup",
            Tag::LimInf => "LimInf",
            Tag::LimAvg => "LimAvg",
            Tag::Disc => "Disc",
        };
        f.write_str(s)
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .into_iter()
            .find(|t| t.keyword().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown semantics `{s}`"))
    }
}

/// Value function of an automaton. `Disc` carries its discount factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueFunction {
    Last,
    Max,
    Sum,
    Sup,
    LimSup,
    LimInf,
    LimAvg,
    Disc(Rational),
}

impl ValueFunction {
    pub fn tag(&self) -> Tag {
        match self {
            ValueFunction::Last => Tag::Last,
            ValueFunction::Max => Tag::Max,
            ValueFunction::Sum => Tag::Sum,
            ValueFunction::Sup => Tag::Sup,
            ValueFunction::LimSup => Tag::LimSup,
            ValueFunction::LimInf => Tag::LimInf,
            ValueFunction::LimAvg => Tag::LimAvg,
            ValueFunction::Disc(_) => Tag::Disc,
        }
    }

    /// Builds the value function for `tag`; `lambda` is required for `Disc` only.
    pub fn from_tag(tag: Tag, lambda: Option<Rational>) -> Option<Self> {
        Some(match (tag, lambda) {
            (Tag::Disc, Some(l)) => ValueFunction::Disc(l),
            (Tag::Disc, None) | (_, Some(_)) => return None,
            (Tag::Last, None) => ValueFunction::Last,
            (Tag::Max, None) => ValueFunction::Max,
            (Tag::Sum, None) => ValueFunction::Sum,
            (Tag::Sup, None) => ValueFunction::Sup,
            (Tag::LimSup, None) => ValueFunction::LimSup,
            (Tag::LimInf, None) => ValueFunction::LimInf,
            (Tag::LimAvg, None) => ValueFunction::LimAvg,
        })
    }

    pub fn lambda(&self) -> Option<&Rational> {
        match self {
            ValueFunction::Disc(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_finite_word(&self) -> bool {
        self.tag().is_finite_word()
    }

    /// Value of a finite weight sequence (Last, Max, Sum). `None` for an
    /// empty sequence or an infinite-word value function.
    pub fn value_of_finite(&self, weights: &[Rational]) -> Option<Rational> {
        let last = weights.last()?;
        match self {
            ValueFunction::Last => Some(last.clone()),
            ValueFunction::Max => weights.iter().max().cloned(),
            ValueFunction::Sum => Some(weights.iter().sum()),
            _ => None,
        }
    }

    /// Value of the ultimately periodic sequence `stem · cycle^ω`.
    /// `None` when `cycle` is empty or the value function is finite-word.
    pub fn value_of_lasso(&self, stem: &[Rational], cycle: &[Rational]) -> Option<Rational> {
        if cycle.is_empty() {
            return None;
        }
        match self {
            ValueFunction::Sup => stem.iter().chain(cycle).max().cloned(),
            ValueFunction::LimSup => cycle.iter().max().cloned(),
            ValueFunction::LimInf => cycle.iter().min().cloned(),
            ValueFunction::LimAvg => {
                let total: Rational = cycle.iter().sum();
                Some(total / Rational::integer(cycle.len() as i64))
            }
            ValueFunction::Disc(lambda) => Some(discounted_lasso(lambda, stem, cycle)),
            _ => None,
        }
    }
}

/// `Σ_i λ^i a_i + λ^|stem| · (Σ_j λ^j b_j) / (1 − λ^|cycle|)`.
pub fn discounted_lasso(lambda: &Rational, stem: &[Rational], cycle: &[Rational]) -> Rational {
    let head = discounted_prefix(lambda, stem);
    let loop_sum = discounted_prefix(lambda, cycle);
    let tail = loop_sum / (Rational::one() - lambda.pow(cycle.len()));
    head + lambda.pow(stem.len()) * tail
}

/// `Σ_{i<n} λ^i w_i`, evaluated by Horner's rule.
pub fn discounted_prefix(lambda: &Rational, weights: &[Rational]) -> Rational {
    weights
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, w| w + &(lambda * &acc))
}

impl fmt::Display for ValueFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueFunction::Disc(l) => write!(f, "Disc({l})"),
            other => write!(f, "{}", other.tag()),
        }
    }
}
