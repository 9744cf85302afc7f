//! Boolean projection: the unweighted automaton recognizing the support.

use super::{require_eq_restricted_or_sink_free, ConstructError};
use crate::automaton::{Automaton, Partition};
use crate::semiring::{Semiring, Weight};
use crate::term::{Label, Symbol, Tree};

/// Drops the weights. For an eq-restricted automaton the sink and its rules
/// are removed and every sink-labelled constrained position takes the state
/// of the unique non-sink member of its class.
///
/// The result recognizes the support when every run has a nonzero weight
/// and the automaton is unambiguous or its semiring is zero-sum free. The
/// caller is responsible for those conditions.
pub fn project_boolean(a: &Automaton) -> Result<Automaton, ConstructError> {
    require_eq_restricted_or_sink_free(a)?;
    let one = Semiring::Boolean.one();
    let Some(sink) = a.sink() else {
        let rules = a
            .rules()
            .iter()
            .map(|r| (r.lhs().clone(), r.constraint().clone(), r.target().clone(), one.clone()))
            .collect();
        return Ok(Automaton::from_parts(
            Semiring::Boolean,
            a.alphabet().clone(),
            a.states().to_vec(),
            None,
            a.finals().clone(),
            rules,
        ));
    };
    let sink_label = Label::State(sink.clone());
    let mut rules: Vec<(Tree, Partition, Symbol, Weight)> = Vec::new();
    for r in a.rules().iter().filter(|r| r.target() != sink) {
        let mut lhs = r.lhs().clone();
        for class in r.constraint().classes() {
            let leader = class
                .iter()
                .find_map(|p| r.lhs().label_at(p).filter(|l| **l != sink_label))
                .expect("eq-restricted classes have a non-sink member")
                .clone();
            for p in class {
                if r.lhs().label_at(p) == Some(&sink_label) {
                    lhs = lhs.replace_at(p, Tree::leaf(leader.clone())).expect("class positions are positions");
                }
            }
        }
        rules.push((lhs, r.constraint().clone(), r.target().clone(), one.clone()));
    }
    let states = a.states().iter().filter(|q| *q != sink).cloned().collect();
    Ok(Automaton::from_parts(Semiring::Boolean, a.alphabet().clone(), states, None, a.finals().clone(), rules))
}
