//! Shared fixtures and independent reference implementations.
#![allow(dead_code)]

pub mod random;

use std::path::PathBuf;

use wtah::automaton::Automaton;
use wtah::semiring::Weight;
use wtah::term::{enumerate_trees, parse_term, Label, LeafScope, Tree};
use wtah::{parse_automaton, parse_hom, TreeHomomorphism};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn automaton(name: &str) -> Automaton {
    parse_automaton(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn hom(name: &str) -> TreeHomomorphism {
    parse_hom(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn tree(a: &Automaton, text: &str) -> Tree {
    parse_term(a.alphabet(), LeafScope::GROUND, text).unwrap()
}

/// Subtrees of `t` at the state leaves of `lhs`, in preorder.
fn bind(lhs: &Tree, t: &Tree, out: &mut Vec<Tree>) -> bool {
    if lhs.label().is_state() {
        out.push(t.clone());
        return true;
    }
    lhs.label() == t.label()
        && lhs.children().len() == t.children().len()
        && lhs.children().iter().zip(t.children()).all(|(l, c)| bind(l, c, out))
}

/// All runs of `a` on `t` to `q` as (rule-tree text, weight), without any
/// memoization or shared code with the library's enumerator.
pub fn naive_runs(a: &Automaton, t: &Tree, q: &str) -> Vec<(String, Weight)> {
    let mut out = Vec::new();
    for (i, r) in a.rules().iter().enumerate() {
        if &**r.target() != q {
            continue;
        }
        let mut subs = Vec::new();
        if !bind(r.lhs(), t, &mut subs) {
            continue;
        }
        let satisfied = r.constraint().classes().iter().all(|class| {
            let first = t.subtree_at(&class[0]).unwrap();
            class.iter().all(|p| t.subtree_at(p).unwrap() == first)
        });
        if !satisfied {
            continue;
        }
        let mut partial: Vec<(Vec<String>, Weight)> = vec![(Vec::new(), r.weight().clone())];
        for (j, sub) in subs.iter().enumerate() {
            let state = match r.lhs().label_at(&r.state_positions()[j]) {
                Some(Label::State(s)) => s.clone(),
                _ => unreachable!(),
            };
            let child = naive_runs(a, sub, &state);
            let mut next = Vec::new();
            for (names, w) in &partial {
                for (cn, cw) in &child {
                    let mut n = names.clone();
                    n.push(cn.clone());
                    next.push((n, w * cw));
                }
            }
            partial = next;
        }
        for (names, w) in partial {
            let text = if names.is_empty() { format!("r{i}") } else { format!("r{i}({})", names.join(",")) };
            out.push((text, w));
        }
    }
    out
}

pub fn naive_eval(a: &Automaton, t: &Tree) -> Weight {
    let mut total = a.semiring().zero();
    for f in a.finals() {
        for (_, w) in naive_runs(a, t, f) {
            total = &total + &w;
        }
    }
    total
}

pub fn naive_accepting(a: &Automaton, t: &Tree) -> usize {
    a.finals().iter().map(|f| naive_runs(a, t, f).iter().filter(|(_, w)| !w.is_zero()).count()).sum()
}

/// `(t, ⟦A⟧(t))` over all trees of height ≤ `bound` with nonzero value.
pub fn naive_support(a: &Automaton, bound: usize) -> Vec<(Tree, Weight)> {
    enumerate_trees(a.alphabet(), bound)
        .into_iter()
        .filter_map(|t| {
            let w = naive_eval(a, &t);
            (!w.is_zero()).then_some((t, w))
        })
        .collect()
}
