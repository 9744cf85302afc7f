//! Canonical forms for comparing automata.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use super::{Automaton, Rule};
use crate::term::{Label, Symbol, Tree};

/// An automaton with every component in a fixed order: states by name,
/// rules by (lhs text, target, constraint text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CanonicalForm {
    pub semiring: String,
    pub alphabet: Vec<(String, usize)>,
    pub states: Vec<String>,
    pub sink: Option<String>,
    pub finals: Vec<String>,
    /// `(lhs, target, constraint, weight)`.
    pub rules: Vec<(String, String, String, String)>,
}

impl CanonicalForm {
    pub fn of(a: &Automaton) -> CanonicalForm {
        let mut states: Vec<String> = a.states.iter().map(|s| s.to_string()).collect();
        states.sort();
        let mut rules: Vec<(String, String, String, String)> = a
            .rules
            .iter()
            .map(|r| (r.lhs.to_string(), r.target.to_string(), r.constraint.to_string(), r.weight.to_string()))
            .collect();
        rules.sort();
        CanonicalForm {
            semiring: a.semiring.id(),
            alphabet: a.alphabet.iter().map(|(s, r)| (s.to_string(), r)).collect(),
            states,
            sink: a.sink.as_ref().map(|s| s.to_string()),
            finals: a.finals.iter().map(|s| s.to_string()).collect(),
            rules,
        }
    }
}

/// Rule text with every state replaced by its color, and `self_state`
/// (if given) marked so a state's occurrences are distinguishable.
fn colored_key(r: &Rule, colors: &HashMap<Symbol, usize>, self_state: Option<&Symbol>) -> (String, String, String, String) {
    let paint = |s: &Symbol| match self_state {
        Some(me) if me == s => "*".to_string(),
        _ => format!("c{}", colors[s]),
    };
    let lhs = r.lhs.substitute(&|l: &Label| match l {
        Label::State(s) => Some(Tree::state(&paint(s))),
        _ => None,
    });
    (lhs.to_string(), paint(&r.target), r.constraint.to_string(), r.weight.to_string())
}

/// Colors states by iterated refinement: start from (final, sink) and split
/// by the colored rules each state occurs in, until no class splits.
fn refine_colors(a: &Automaton) -> HashMap<Symbol, usize> {
    let rank = |sigs: &HashMap<Symbol, String>| -> HashMap<Symbol, usize> {
        let distinct: BTreeSet<&String> = sigs.values().collect();
        let index: HashMap<&String, usize> = distinct.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        sigs.iter().map(|(q, s)| (q.clone(), index[s])).collect()
    };
    let initial: HashMap<Symbol, String> = a
        .states
        .iter()
        .map(|q| (q.clone(), format!("{}{}", a.finals.contains(q), a.sink.as_ref() == Some(q))))
        .collect();
    let mut colors = rank(&initial);
    loop {
        let count = colors.values().collect::<BTreeSet<_>>().len();
        let sigs: HashMap<Symbol, String> = a
            .states
            .iter()
            .map(|q| {
                let mut occurrences: Vec<_> = a
                    .rules
                    .iter()
                    .filter(|r| &r.target == q || r.states().any(|s| s == q))
                    .map(|r| colored_key(r, &colors, Some(q)))
                    .collect();
                occurrences.sort();
                (q.clone(), format!("{}{:?}", colors[q], occurrences))
            })
            .collect();
        let next = rank(&sigs);
        if next.values().collect::<BTreeSet<_>>().len() == count {
            return colors;
        }
        colors = next;
    }
}

/// Renames states to `s0, s1, …` in order of first use, scanning rules
/// sorted by their text with states replaced by refinement colors and,
/// within a rule, the states of the left-hand side in ≤lex order before the
/// target. Unused states follow in color, then name order.
pub(super) fn rename_by_first_use(a: &Automaton) -> Automaton {
    let colors = refine_colors(a);
    let mut order: Vec<&Rule> = a.rules.iter().collect();
    order.sort_by_cached_key(|r| colored_key(r, &colors, None));
    let mut names: HashMap<Symbol, Symbol> = HashMap::new();
    let assign = |s: &Symbol, names: &mut HashMap<Symbol, Symbol>| {
        let next = names.len();
        names.entry(s.clone()).or_insert_with(|| Arc::from(format!("s{next}").as_str()));
    };
    for r in &order {
        for s in r.states() {
            assign(s, &mut names);
        }
        assign(&r.target, &mut names);
    }
    let mut unused: Vec<&Symbol> = a.states.iter().filter(|s| !names.contains_key(*s)).collect();
    unused.sort_by_key(|s| (colors[*s], (*s).clone()));
    for s in unused {
        assign(s, &mut names);
    }

    let rename = |s: &Symbol| names[s].clone();
    let rules = a
        .rules
        .iter()
        .map(|r| Rule {
            lhs: r.lhs.substitute(&|l: &Label| match l {
                Label::State(s) => Some(Tree::leaf(Label::State(rename(s)))),
                _ => None,
            }),
            constraint: r.constraint.clone(),
            target: rename(&r.target),
            weight: r.weight.clone(),
            q_positions: r.q_positions.clone(),
        })
        .collect();
    Automaton::assemble(
        a.semiring,
        a.alphabet.clone(),
        a.states.iter().map(&rename).collect(),
        a.sink.as_ref().map(&rename),
        a.finals.iter().map(&rename).collect(),
        rules,
    )
}
