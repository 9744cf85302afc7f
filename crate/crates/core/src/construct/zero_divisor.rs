//! Removing runs of weight zero over semirings with zero divisors.
//!
//! Over a finite semiring the weight of a run is `∏ s_i^{m_i}` where `s_i`
//! ranges over the rule weights other than one and `m_i` counts how often a
//! rule of weight `s_i` was applied. Each state is paired with the vector
//! `m`, capped at `u`, and only vectors with a nonzero product survive. The
//! powers of every `s_i` are eventually periodic, so capping at
//! `u = max(index_i + period_i)` keeps zero and nonzero products apart.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{require_eq_restricted_or_sink_free, ConstructError};
use crate::automaton::{fresh_name, Automaton, Partition};
use crate::semiring::Weight;
use crate::term::{product_of, Label, Symbol, Tree};

/// Which variant of the construction was used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum ZeroDivisorPath {
    /// The semiring has no zero divisors; the automaton is returned as is.
    ZeroDivisorFree,
    /// States were paired with capped exponent vectors.
    PowerVectors { generators: Vec<Weight>, cap: usize, vectors: usize, states: usize },
}

impl std::fmt::Display for ZeroDivisorPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZeroDivisorPath::ZeroDivisorFree => f.write_str("zero-divisor free, unchanged"),
            ZeroDivisorPath::PowerVectors { generators, cap, vectors, states } => {
                let gens: Vec<String> = generators.iter().map(Weight::to_string).collect();
                write!(
                    f,
                    "power vectors over [{}] capped at {cap}: {vectors} nonzero vectors, {states} states",
                    gens.join(", ")
                )
            }
        }
    }
}

/// An equivalent automaton in which every run has a nonzero weight.
pub fn eliminate_zero_divisors(a: &Automaton) -> Result<Automaton, ConstructError> {
    eliminate_zero_divisors_with_path(a).map(|(b, _)| b)
}

pub fn eliminate_zero_divisors_with_path(a: &Automaton) -> Result<(Automaton, ZeroDivisorPath), ConstructError> {
    require_eq_restricted_or_sink_free(a)?;
    let semiring = a.semiring();
    if semiring.is_zero_divisor_free() {
        return Ok((a.clone(), ZeroDivisorPath::ZeroDivisorFree));
    }
    if !semiring.is_finite() {
        return Err(ConstructError::InfiniteWithZeroDivisors(semiring));
    }

    let generators: Vec<Weight> =
        a.rules().iter().map(|r| r.weight().clone()).filter(|w| !w.is_one()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut cap = 0;
    for s in &generators {
        let (index, period) = s.power_index_period()?;
        cap = cap.max(index + period);
    }
    let n = generators.len();
    let nonzero = |v: &[usize]| -> bool {
        let mut w = semiring.one();
        for (s, &m) in generators.iter().zip(v) {
            w = &w * &s.pow(m);
        }
        !w.is_zero()
    };
    let unit = |w: &Weight| -> Vec<usize> {
        let mut v = vec![0; n];
        if let Some(i) = generators.iter().position(|g| g == w) {
            v[i] = 1;
        }
        v
    };
    let oplus = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().zip(y).map(|(a, b)| (a + b).min(cap)).collect() };

    let sink = a.sink().cloned();
    let is_sink = |s: &Symbol| sink.as_ref() == Some(s);

    // Bottom-up fixpoint over annotated states reachable by some run.
    let mut reached: HashMap<Symbol, BTreeSet<Vec<usize>>> = HashMap::new();
    let mut annotated_rules: BTreeSet<(usize, Vec<Vec<usize>>, Vec<usize>)> = BTreeSet::new();
    loop {
        let mut changed = false;
        for (i, r) in a.rules().iter().enumerate() {
            if is_sink(r.target()) {
                continue;
            }
            let slots: Vec<usize> = (0..r.rank()).filter(|&j| !is_sink(r.state_at(j))).collect();
            let choices: Vec<Vec<Vec<usize>>> = slots
                .iter()
                .map(|&j| reached.get(r.state_at(j)).map(|s| s.iter().cloned().collect()).unwrap_or_default())
                .collect();
            for pick in product_of(&choices) {
                let v = pick.iter().fold(unit(r.weight()), |acc, x| oplus(&acc, x));
                if !nonzero(&v) {
                    continue;
                }
                if annotated_rules.insert((i, pick, v.clone())) {
                    changed = true;
                }
                reached.entry(r.target().clone()).or_default().insert(v);
            }
        }
        if !changed {
            break;
        }
    }

    let mut names: HashMap<(Symbol, Vec<usize>), Symbol> = HashMap::new();
    let mut taken: BTreeSet<String> = a.states().iter().map(|s| s.to_string()).collect();
    let mut states: Vec<Symbol> = Vec::new();
    for q in a.states().iter().filter(|q| !is_sink(q)) {
        for v in reached.get(q).into_iter().flatten() {
            let digits: Vec<String> = v.iter().map(usize::to_string).collect();
            let base = if digits.is_empty() { format!("{q}_v") } else { format!("{q}_{}", digits.join("_")) };
            let name = fresh_name(&base, &|c| taken.contains(c) || a.alphabet().contains(c));
            taken.insert(name.to_string());
            names.insert((q.clone(), v.clone()), name.clone());
            states.push(name);
        }
    }
    if let Some(s) = &sink {
        states.push(s.clone());
    }
    let finals = a
        .finals()
        .iter()
        .flat_map(|f| reached.get(f).into_iter().flatten().map(|v| names[&(f.clone(), v.clone())].clone()))
        .collect();

    let mut rules: Vec<(Tree, Partition, Symbol, Weight)> = Vec::new();
    for (i, pick, v) in &annotated_rules {
        let r = a.rule(*i);
        let slots: Vec<usize> = (0..r.rank()).filter(|&j| !is_sink(r.state_at(j))).collect();
        let mut lhs = r.lhs().clone();
        for (&j, vj) in slots.iter().zip(pick) {
            let renamed = names[&(r.state_at(j).clone(), vj.clone())].clone();
            lhs = lhs.replace_at(&r.state_positions()[j], Tree::leaf(Label::State(renamed))).expect("state position");
        }
        let target = names[&(r.target().clone(), v.clone())].clone();
        rules.push((lhs, r.constraint().clone(), target, r.weight().clone()));
    }
    for r in a.rules().iter().filter(|r| is_sink(r.target())) {
        rules.push((r.lhs().clone(), r.constraint().clone(), r.target().clone(), r.weight().clone()));
    }

    let vectors = product_of(&vec![(0..=cap).collect::<Vec<_>>(); n]).iter().filter(|v| nonzero(v)).count();
    let path = ZeroDivisorPath::PowerVectors { generators, cap, vectors, states: states.len() };
    Ok((Automaton::from_parts(semiring, a.alphabet().clone(), states, sink, finals, rules), path))
}
