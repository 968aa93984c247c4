//! Line-oriented text format for automata.
//!
//! ```text
//! automaton gap
//! semantics disc 2/3
//! alphabet a b
//! states 1
//! initial 0
//! trans 0 a 0 5/6
//! trans 0 b 0 0/1
//! ```
//!
//! `#` starts a comment. [`serialize`] writes transitions sorted by
//! `(src, symbol, dst, weight)`, with symbols ordered as in the alphabet
//! line, so that `serialize(parse(s)) == s` for every canonical `s`.

use std::fmt::Write as _;

use crate::automaton::{Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuefn::{Tag, ValueFunction};

pub fn serialize(aut: &WeightedAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "automaton {}", aut.name()).unwrap();
    match aut.valuefn() {
        ValueFunction::Disc(l) => writeln!(out, "semantics disc {}", l.to_fraction_string()),
        v => writeln!(out, "semantics {}", v.tag().keyword()),
    }
    .unwrap();
    writeln!(out, "alphabet {}", aut.alphabet().join(" ")).unwrap();
    writeln!(out, "states {}", aut.num_states()).unwrap();
    writeln!(out, "initial {}", aut.initial()).unwrap();
    for t in aut.transitions() {
        writeln!(
            out,
            "trans {} {} {} {}",
            t.src,
            aut.alphabet()[t.symbol],
            t.dst,
            t.weight.to_fraction_string()
        )
        .unwrap();
    }
    out
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    valuefn: Option<ValueFunction>,
    alphabet: Option<Vec<String>>,
    states: Option<usize>,
    initial: Option<usize>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, key: &str) -> Result<()> {
    if slot.is_some() {
        return Err(parse_err(line, format!("duplicate `{key}` line")));
    }
    *slot = Some(value);
    Ok(())
}

/// Parses an automaton and checks it with [`WeightedAutomaton::validate`].
pub fn parse(text: &str) -> Result<WeightedAutomaton> {
    let aut = parse_unchecked(text)?;
    aut.ensure_valid()?;
    Ok(aut)
}

/// Parses without the totality and discount checks.
pub fn parse_unchecked(text: &str) -> Result<WeightedAutomaton> {
    let mut h = Header::default();
    let mut raw: Vec<(usize, usize, String, usize, Rational)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let content = line.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        let Some(key) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();
        let int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| parse_err(ln, format!("expected a non-negative integer, got `{s}`")))
        };
        let rat = |s: &str| -> Result<Rational> { s.parse::<Rational>().map_err(|e| parse_err(ln, e.to_string())) };
        match (key, rest.as_slice()) {
            ("automaton", [name]) => set_once(&mut h.name, name.to_string(), ln, key)?,
            ("semantics", [tag, more @ ..]) => {
                let tag: Tag = tag.parse().map_err(|e: String| parse_err(ln, e))?;
                let lambda = match more {
                    [] => None,
                    [l] => Some(rat(l)?),
                    _ => return Err(parse_err(ln, "too many arguments to `semantics`")),
                };
                let vf = ValueFunction::from_tag(tag, lambda)
                    .ok_or_else(|| parse_err(ln, "`disc` needs exactly one discount factor, other semantics none"))?;
                set_once(&mut h.valuefn, vf, ln, key)?;
            }
            ("alphabet", syms) if !syms.is_empty() => {
                set_once(&mut h.alphabet, syms.iter().map(|s| s.to_string()).collect(), ln, key)?
            }
            ("states", [n]) => set_once(&mut h.states, int(n)?, ln, key)?,
            ("initial", [q]) => set_once(&mut h.initial, int(q)?, ln, key)?,
            ("trans", [src, sym, dst, w]) => raw.push((ln, int(src)?, sym.to_string(), int(dst)?, rat(w)?)),
            (k, _) if ["automaton", "semantics", "alphabet", "states", "initial", "trans"].contains(&k) => {
                return Err(parse_err(ln, format!("wrong number of arguments to `{k}`")))
            }
            (k, _) => return Err(parse_err(ln, format!("unknown keyword `{k}`"))),
        }
    }
    let missing = |what: &str| parse_err(0, format!("missing `{what}` line"));
    let name = h.name.ok_or_else(|| missing("automaton"))?;
    let valuefn = h.valuefn.ok_or_else(|| missing("semantics"))?;
    let alphabet = h.alphabet.ok_or_else(|| missing("alphabet"))?;
    let states = h.states.ok_or_else(|| missing("states"))?;
    let initial = h.initial.ok_or_else(|| missing("initial"))?;
    let mut transitions = Vec::with_capacity(raw.len());
    for (ln, src, sym, dst, weight) in raw {
        let symbol = alphabet
            .iter()
            .position(|s| *s == sym)
            .ok_or_else(|| parse_err(ln, format!("symbol `{sym}` is not in the alphabet")))?;
        if src >= states || dst >= states {
            return Err(parse_err(ln, format!("state out of range (states {states})")));
        }
        transitions.push(Transition {
            src,
            symbol,
            dst,
            weight,
        });
    }
    WeightedAutomaton::new(name, alphabet, states, initial, valuefn, transitions)
        .map_err(|e| parse_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAP: &str =
        "automaton gap\nsemantics disc 2/3\nalphabet a b\nstates 1\ninitial 0\ntrans 0 a 0 5/6\ntrans 0 b 0 0/1\n";

    #[test]
    fn canonical_round_trip() {
        let a = parse(GAP).unwrap();
        assert_eq!(serialize(&a), GAP);
        assert_eq!(parse(&serialize(&a)).unwrap(), a);
    }

    #[test]
    fn comments_integers_and_order_are_normalized() {
        let messy = "# gap witness\nautomaton gap\nsemantics disc 2/3\nalphabet a b\nstates 1\ninitial 0\ntrans 0 b 0 0   # zero\ntrans 0 a 0 10/12\n";
        assert_eq!(serialize(&parse(messy).unwrap()), GAP);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = GAP.replace("trans 0 a 0 5/6", "trans 0 c 0 5/6");
        assert!(matches!(parse(&bad), Err(Error::Parse { line: 6, .. })));
        let bad = GAP.replace("semantics disc 2/3", "semantics limavg 2/3");
        assert!(matches!(parse(&bad), Err(Error::Parse { line: 2, .. })));
        let bad = GAP.replace("states 1", "states one");
        assert!(matches!(parse(&bad), Err(Error::Parse { line: 4, .. })));
        assert!(matches!(parse("automaton x\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn partial_automaton_is_rejected() {
        let partial = GAP.replace("trans 0 b 0 0/1\n", "");
        assert!(parse_unchecked(&partial).is_ok());
        assert!(matches!(parse(&partial), Err(Error::InvalidAutomaton(_))));
    }
}
