//! Flattening a WTG into a WTA.

use super::ConstructError;
use crate::automaton::{fresh_name, Automaton, Partition};
use crate::semiring::Weight;
use crate::term::{Label, Position, Symbol, Tree};

/// An equivalent WTA. Each deep left-hand side is cut into depth-one rules:
/// the subtree at a symbol position `p` of rule `i` is recognized by a fresh
/// state `n{i}_{p}` through rules of weight one, and the root rule keeps
/// the original weight. WTA inputs are returned unchanged.
pub fn wtg_to_wta(g: &Automaton) -> Result<Automaton, ConstructError> {
    if g.is_wta() {
        return Ok(g.clone());
    }
    if !g.is_wtg() {
        return Err(ConstructError::NotWtg(g.kind().to_string()));
    }
    let mut states: Vec<Symbol> = g.states().to_vec();
    let mut rules: Vec<(Tree, Partition, Symbol, Weight)> = Vec::new();
    for (i, r) in g.rules().iter().enumerate() {
        let lhs = flatten(g, i, r.lhs(), &Position::root(), &mut states, &mut rules);
        rules.push((lhs, Partition::identity(), r.target().clone(), r.weight().clone()));
    }
    Ok(Automaton::from_parts(g.semiring(), g.alphabet().clone(), states, g.sink().cloned(), g.finals().clone(), rules))
}

/// Returns the depth-one left-hand side for `t` at `at`, adding rules for
/// every symbol child.
fn flatten(
    g: &Automaton,
    rule: usize,
    t: &Tree,
    at: &Position,
    states: &mut Vec<Symbol>,
    rules: &mut Vec<(Tree, Partition, Symbol, Weight)>,
) -> Tree {
    let children = t
        .children()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if c.label().is_state() {
                return c.clone();
            }
            let p = at.child(j + 1);
            let path: Vec<String> = p.path().iter().map(usize::to_string).collect();
            let name = fresh_name(&format!("n{rule}_{}", path.join("_")), &|n| {
                states.iter().any(|s| &**s == n) || g.alphabet().contains(n)
            });
            states.push(name.clone());
            let lhs = flatten(g, rule, c, &p, states, rules);
            rules.push((lhs, Partition::identity(), name.clone(), g.semiring().one()));
            Tree::leaf(Label::State(name))
        })
        .collect();
    Tree::new(t.label().clone(), children)
}
