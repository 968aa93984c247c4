//! Finite words and ultimately periodic (lasso) infinite words.

use std::fmt;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};

/// The infinite word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    prefix: Vec<String>,
    period: Vec<String>,
}

impl LassoWord {
    pub fn new(prefix: Vec<String>, period: Vec<String>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::precondition("lasso period must be nonempty"));
        }
        Ok(LassoWord { prefix, period })
    }

    /// Shorthand for tests and fixtures: `LassoWord::parse("a", "b a")`.
    pub fn from_strs(prefix: &str, period: &str) -> Result<Self> {
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect();
        LassoWord::new(split(prefix), split(period))
    }

    pub fn prefix(&self) -> &[String] {
        &self.prefix
    }

    pub fn period(&self) -> &[String] {
        &self.period
    }

    /// `|prefix| + |period|`, the number of product-graph positions.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol at position `i` of the infinite word.
    pub fn symbol_at(&self, i: usize) -> &str {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Symbol indices relative to `aut`'s alphabet, prefix followed by period.
    pub fn indices_in(&self, aut: &WeightedAutomaton) -> Result<Vec<usize>> {
        self.prefix
            .iter()
            .chain(&self.period)
            .map(|s| aut.symbol_index(s).ok_or_else(|| Error::UnknownSymbol(s.clone())))
            .collect()
    }

    /// Position following `i` in the product graph (the period wraps).
    pub fn next_position(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

impl fmt::Display for LassoWord {
    /// Renders in the CLI literal syntax, e.g. `a b | c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = self.prefix.iter().map(String::as_str).collect();
        parts.push("|");
        parts.extend(self.period.iter().map(String::as_str));
        f.write_str(&parts.join(" "))
    }
}

/// A nonempty finite word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteWord {
    symbols: Vec<String>,
}

impl FiniteWord {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::precondition("finite words must be nonempty"));
        }
        Ok(FiniteWord { symbols })
    }

    pub fn from_str_tokens(s: &str) -> Result<Self> {
        FiniteWord::new(s.split_whitespace().map(str::to_string).collect())
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices_in(&self, aut: &WeightedAutomaton) -> Result<Vec<usize>> {
        self.symbols
            .iter()
            .map(|s| aut.symbol_index(s).ok_or_else(|| Error::UnknownSymbol(s.clone())))
            .collect()
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbols.join(" "))
    }
}

/// Either kind of word, as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Finite(FiniteWord),
    Lasso(LassoWord),
}

impl Word {
    /// Parses a word literal: space-separated symbols, with `|` separating
    /// prefix from period for infinite words.
    pub fn parse(literal: &str) -> Result<Word> {
        match literal.split_once('|') {
            None => Ok(Word::Finite(FiniteWord::from_str_tokens(literal)?)),
            Some((prefix, period)) => {
                if period.contains('|') {
                    return Err(Error::precondition("word literal has more than one `|`"));
                }
                Ok(Word::Lasso(LassoWord::from_strs(prefix, period)?))
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Finite(w) => w.fmt(f),
            Word::Lasso(w) => w.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_parsing() {
        let w = Word::parse("a | b c").unwrap();
        let Word::Lasso(l) = w else { panic!() };
        assert_eq!(l.prefix(), ["a"]);
        assert_eq!(l.period(), ["b", "c"]);
        assert_eq!(l.symbol_at(0), "a");
        assert_eq!(l.symbol_at(3), "b");
        assert_eq!(l.symbol_at(4), "c");
        assert_eq!(l.next_position(2), 1);
        assert_eq!(l.to_string(), "a | b c");

        let Word::Lasso(l) = Word::parse("| a").unwrap() else {
            panic!()
        };
        assert!(l.prefix().is_empty());
        assert_eq!(l.to_string(), "| a");

        assert!(matches!(Word::parse("a a b").unwrap(), Word::Finite(_)));
        assert!(Word::parse("a |").is_err());
        assert!(Word::parse("").is_err());
        assert!(Word::parse("a | b | c").is_err());
    }
}
