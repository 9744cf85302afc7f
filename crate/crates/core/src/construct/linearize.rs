//! Linearization: replacing constrained positions by concrete trees.

use super::{require_eq_restricted_or_sink_free, ConstructError};
use crate::automaton::{Automaton, Evaluator, Partition, TreeDomain};
use crate::semiring::Weight;
use crate::term::{product_of, Label, Position, Symbol, Tree};

/// The WTG `lin(A, lin_height)`.
///
/// Every constraint class of a rule (for an eq-restricted automaton, the
/// classes containing the sink) is instantiated with each tree `t` of height
/// ≤ `lin_height` on which all states of the class have nonzero weight. The
/// new rule has weight `wt(r) · ∏_p wt^{ℓ(p)}(t)` over all instantiated
/// positions `p`. Classes are taken in order of their least position and
/// trees in (height, size, text) order; coinciding rules add up.
pub fn linearize(a: &Automaton, lin_height: usize) -> Result<Automaton, ConstructError> {
    require_eq_restricted_or_sink_free(a)?;
    let sink = a.sink().cloned();
    let is_sink = |s: &Symbol| sink.as_ref() == Some(s);
    let mut domain = TreeDomain::new(a);
    let mut eval = Evaluator::new(a);
    let mut rules: Vec<(Tree, Partition, Symbol, Weight)> = Vec::new();

    for r in a.rules().iter().filter(|r| !is_sink(r.target())) {
        let state = |p: &Position| -> Symbol {
            match r.lhs().label_at(p) {
                Some(Label::State(s)) => s.clone(),
                _ => unreachable!("constraint positions are state positions"),
            }
        };
        let classes = r.constraint().classes();
        let mut choices: Vec<Vec<(Tree, Weight)>> = Vec::with_capacity(classes.len());
        for class in classes {
            let members: Vec<usize> =
                class.iter().map(|p| a.state_index(&state(p)).expect("declared state")).collect();
            let leader = class.iter().map(&state).find(|s| !is_sink(s)).unwrap_or_else(|| state(&class[0]));
            let leader = a.state_index(&leader).expect("declared state");
            let mut options = Vec::new();
            for t in domain.trees_to(leader, lin_height).iter() {
                let weights = eval.weights(t);
                let w = members.iter().fold(a.semiring().one(), |acc, &q| &acc * &weights[q]);
                if members.iter().all(|&q| !weights[q].is_zero()) {
                    options.push((t.clone(), w));
                }
            }
            choices.push(options);
        }
        for pick in product_of(&choices) {
            let mut lhs = r.lhs().clone();
            let mut weight = r.weight().clone();
            for (class, (t, w)) in classes.iter().zip(&pick) {
                for p in class {
                    lhs = lhs.replace_at(p, t.clone()).expect("class positions are positions");
                }
                weight = &weight * w;
            }
            if !weight.is_zero() {
                rules.push((lhs, Partition::identity(), r.target().clone(), weight));
            }
        }
    }
    let states = a.states().iter().filter(|q| !is_sink(q)).cloned().collect();
    Ok(Automaton::from_parts(a.semiring(), a.alphabet().clone(), states, None, a.finals().clone(), rules))
}
