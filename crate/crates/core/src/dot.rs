//! Graphviz export.

use std::fmt::Write as _;

use crate::automaton::WeightedAutomaton;
use crate::valuefn::Tag;

/// DOT digraph with one node per state and one labelled edge per
/// transition. For Büchi views (LimSup with weights in {0, 1}) the
/// accepting weight-1 edges are drawn doubled.
pub fn to_dot(aut: &WeightedAutomaton) -> String {
    let buchi = aut.tag() == Tag::LimSup
        && aut
            .transitions()
            .iter()
            .all(|t| t.weight.is_zero() || t.weight.is_one());
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(aut.name())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  init [shape=point];").unwrap();
    for q in 0..aut.num_states() {
        writeln!(out, "  q{q} [label=\"{q}\", shape=circle];").unwrap();
    }
    writeln!(out, "  init -> q{};", aut.initial()).unwrap();
    for t in aut.transitions() {
        let label = format!("{} / {}", aut.alphabet()[t.symbol], t.weight.to_fraction_string());
        let style = if buchi && t.weight.is_one() {
            ", color=\"black:black\""
        } else {
            ""
        };
        writeln!(out, "  q{} -> q{} [label=\"{}\"{style}];", t.src, t.dst, escape(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuefn::ValueFunction;

    #[test]
    fn one_node_two_edges() {
        let a = WeightedAutomaton::builder("c", &["a", "b"], ValueFunction::LimAvg)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        let d = to_dot(&a);
        assert_eq!(d.matches("shape=circle").count(), 1);
        assert_eq!(d.matches(" -> q0 [label=").count(), 2);
        assert!(d.contains("a / 1/1"));
        assert!(!d.contains("black:black"));
    }

    #[test]
    fn buchi_edges_doubled() {
        let a = WeightedAutomaton::builder("b", &["a", "b"], ValueFunction::LimSup)
            .trans(0, "a", 0, 1)
            .trans(0, "b", 0, 0)
            .build()
            .unwrap();
        assert_eq!(to_dot(&a).matches("black:black").count(), 1);
    }
}
