//! Runs, weights and bounded tree languages of WTAh.
//!
//! A run on `t` for state `q` picks a rule whose left-hand side matches `t`
//! at the root (respecting its constraint) and continues with one run per
//! state position, taken in ≤lex order. The weight of `t` at `q` is the sum
//! of all run weights, computed bottom-up with a memo per subtree.
//!
//! Bounded analyses never enumerate all trees of a height. They use
//! [`TreeDomain`], which builds the set `D_q(H)` of trees of height ≤ `H`
//! with at least one run to `q` rule by rule. Every tree outside `D_F(H)`
//! has weight zero and no accepting run, so results over the domain are the
//! same as over all trees.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::{Automaton, AutomatonError};
use crate::analyze::{Verdict, Witness};
use crate::semiring::Weight;
use crate::term::{product_of, sort_trees, Label, Position, Symbol, Tree};

/// Subtrees of `t` at the state positions of `lhs`, in ≤lex order, or `None`
/// if `lhs` does not match `t` at the root. Constraints are not checked.
fn capture(lhs: &Tree, t: &Tree, out: &mut Vec<Tree>) -> bool {
    match lhs.label() {
        Label::State(_) => {
            out.push(t.clone());
            true
        }
        label => {
            label == t.label()
                && lhs.children().len() == t.children().len()
                && lhs.children().iter().zip(t.children()).all(|(l, c)| capture(l, c, out))
        }
    }
}

/// Captured subtrees for rule `i` on `t`, checking the constraint.
pub(crate) fn match_rule(a: &Automaton, i: usize, t: &Tree) -> Option<Vec<Tree>> {
    let mut caps = Vec::new();
    if !capture(a.rule(i).lhs(), t, &mut caps) {
        return None;
    }
    let ok = a.compiled(i).classes.iter().all(|c| c[1..].iter().all(|&j| caps[j] == caps[c[0]]));
    ok.then_some(caps)
}

/// Replaces the state leaves of `lhs`, in ≤lex order, by `fill`.
pub(crate) fn fill_states(lhs: &Tree, fill: &[Tree]) -> Tree {
    fn go(t: &Tree, fill: &[Tree], next: &mut usize) -> Tree {
        match t.label() {
            Label::State(_) => {
                *next += 1;
                fill[*next - 1].clone()
            }
            label => Tree::new(label.clone(), t.children().iter().map(|c| go(c, fill, next)).collect()),
        }
    }
    go(lhs, fill, &mut 0)
}

/// Memoized computation of `wt^q(t)` for every state `q`.
pub struct Evaluator<'a> {
    a: &'a Automaton,
    memo: HashMap<Tree, Arc<Vec<Weight>>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(a: &'a Automaton) -> Self {
        Evaluator { a, memo: HashMap::new() }
    }

    /// `wt^q(t)` for all states, indexed like [`Automaton::states`].
    pub fn weights(&mut self, t: &Tree) -> Arc<Vec<Weight>> {
        if let Some(w) = self.memo.get(t) {
            return w.clone();
        }
        let a = self.a;
        let mut acc = vec![a.semiring().zero(); a.states().len()];
        if let Label::Sym(sym) = t.label() {
            for &i in a.rules_with_root(sym) {
                let Some(caps) = match_rule(a, i, t) else { continue };
                let compiled = a.compiled(i);
                let mut w = a.rule(i).weight().clone();
                for (sub, &q) in caps.iter().zip(&compiled.states) {
                    if w.is_zero() {
                        break;
                    }
                    w = &w * &self.weights(sub)[q];
                }
                acc[compiled.target] = &acc[compiled.target] + &w;
            }
        }
        let acc = Arc::new(acc);
        self.memo.insert(t.clone(), acc.clone());
        acc
    }

    /// `wt^q(t)`; zero for unknown states.
    pub fn weight_at(&mut self, t: &Tree, q: &str) -> Weight {
        match self.a.state_index(q) {
            Some(i) => self.weights(t)[i].clone(),
            None => self.a.semiring().zero(),
        }
    }

    /// `wt_A(t) = Σ_{q ∈ F} wt^q(t)`.
    pub fn evaluate(&mut self, t: &Tree) -> Weight {
        let w = self.weights(t);
        let a = self.a;
        a.finals()
            .iter()
            .map(|f| &w[a.state_index(f).expect("finals are states")])
            .fold(a.semiring().zero(), |acc, x| &acc + x)
    }
}

/// `wt_A(t)`.
pub fn evaluate(a: &Automaton, t: &Tree) -> Weight {
    Evaluator::new(a).evaluate(t)
}

/// A run of an automaton on a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    rule: usize,
    target: Symbol,
    weight: Weight,
    subject: Tree,
    children: Arc<Vec<Run>>,
}

impl Run {
    /// Builds the run applying rule `rule` at the root of `subject`, with
    /// the weight computed from the rule and the child runs.
    pub(crate) fn assemble(a: &Automaton, rule: usize, subject: Tree, children: Vec<Run>) -> Run {
        let weight = children.iter().fold(a.rule(rule).weight().clone(), |w, c| &w * &c.weight);
        Run { rule, target: a.rule(rule).target().clone(), weight, subject, children: Arc::new(children) }
    }

    /// Index of the rule applied at the root.
    pub fn rule(&self) -> usize {
        self.rule
    }

    pub fn target(&self) -> &Symbol {
        &self.target
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// The tree this run is on.
    pub fn subject(&self) -> &Tree {
        &self.subject
    }

    /// Runs on the subtrees at the rule's state positions, in ≤lex order.
    pub fn children(&self) -> &[Run] {
        &self.children
    }

    pub fn is_accepting(&self, a: &Automaton) -> bool {
        !self.weight.is_zero() && a.is_final(&self.target)
    }

    /// The state assigned to every position of the subject that starts a
    /// rule application.
    pub fn targets_by_position(&self, a: &Automaton) -> BTreeMap<Position, Symbol> {
        let mut out = BTreeMap::new();
        self.collect_targets(a, &Position::root(), &mut out);
        out
    }

    fn collect_targets(&self, a: &Automaton, at: &Position, out: &mut BTreeMap<Position, Symbol>) {
        out.insert(at.clone(), self.target.clone());
        for (p, child) in a.rule(self.rule).state_positions().iter().zip(self.children.iter()) {
            child.collect_targets(a, &at.concat(p), out);
        }
    }

    /// Checks the run against `a`: rule matches, constraint holds, child
    /// runs target the right states on the right subtrees, and the stored
    /// weight is the product of rule weights.
    pub fn is_valid(&self, a: &Automaton) -> bool {
        if self.rule >= a.rules().len() || a.rule(self.rule).target() != &self.target {
            return false;
        }
        let Some(caps) = match_rule(a, self.rule, &self.subject) else { return false };
        if caps.len() != self.children.len() {
            return false;
        }
        let r = a.rule(self.rule);
        let structural = caps.iter().zip(self.children.iter()).enumerate().all(|(i, (sub, child))| {
            &child.subject == sub && child.target == *r.state_at(i) && child.is_valid(a)
        });
        let weight = self.children.iter().fold(r.weight().clone(), |w, c| &w * &c.weight);
        structural && weight == self.weight
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.rule)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Memoized enumeration of all runs on a tree for a state.
pub struct RunEnumerator<'a> {
    a: &'a Automaton,
    memo: HashMap<(Tree, usize), Arc<Vec<Run>>>,
}

impl<'a> RunEnumerator<'a> {
    pub fn new(a: &'a Automaton) -> Self {
        RunEnumerator { a, memo: HashMap::new() }
    }

    /// All runs on `t` for the state with index `q`, ordered by rule index
    /// and then by child runs.
    pub fn runs(&mut self, t: &Tree, q: usize) -> Arc<Vec<Run>> {
        let key = (t.clone(), q);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let a = self.a;
        let mut out = Vec::new();
        if let Label::Sym(sym) = t.label() {
            for &i in a.rules_with_root(sym) {
                if a.compiled(i).target != q {
                    continue;
                }
                let Some(caps) = match_rule(a, i, t) else { continue };
                let choices: Vec<Vec<Run>> = caps
                    .iter()
                    .zip(&a.compiled(i).states)
                    .map(|(sub, &qi)| self.runs(sub, qi).as_ref().clone())
                    .collect();
                for children in product_of(&choices) {
                    out.push(Run::assemble(a, i, t.clone(), children));
                }
            }
        }
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    /// Accepting runs on `t` (final target, nonzero weight), finals in
    /// name order.
    pub fn accepting(&mut self, t: &Tree) -> Vec<Run> {
        let a = self.a;
        let mut out = Vec::new();
        for f in a.finals() {
            let q = a.state_index(f).expect("finals are states");
            out.extend(self.runs(t, q).iter().filter(|r| !r.weight.is_zero()).cloned());
        }
        out
    }
}

/// All runs on `t` for state `q`.
pub fn runs_to_state(a: &Automaton, t: &Tree, q: &str) -> Result<Vec<Run>, AutomatonError> {
    let qi = a.state_index(q).ok_or_else(|| AutomatonError::UndeclaredState(q.to_string()))?;
    Ok(RunEnumerator::new(a).runs(t, qi).as_ref().clone())
}

/// Bounded languages `D_q(H)`: trees of height ≤ `H` with at least one run
/// to `q`.
pub struct TreeDomain<'a> {
    a: &'a Automaton,
    reach: HashMap<Tree, Arc<Vec<bool>>>,
    lang: HashMap<(usize, usize), Arc<Vec<Tree>>>,
}

impl<'a> TreeDomain<'a> {
    pub fn new(a: &'a Automaton) -> Self {
        TreeDomain { a, reach: HashMap::new(), lang: HashMap::new() }
    }

    /// Which states have at least one run on `t`.
    pub fn reachable(&mut self, t: &Tree) -> Arc<Vec<bool>> {
        if let Some(r) = self.reach.get(t) {
            return r.clone();
        }
        let a = self.a;
        let mut acc = vec![false; a.states().len()];
        if let Label::Sym(sym) = t.label() {
            for &i in a.rules_with_root(sym) {
                let compiled = a.compiled(i);
                if acc[compiled.target] {
                    continue;
                }
                let Some(caps) = match_rule(a, i, t) else { continue };
                if caps.iter().zip(&compiled.states).all(|(sub, &q)| self.reachable(sub)[q]) {
                    acc[compiled.target] = true;
                }
            }
        }
        let acc = Arc::new(acc);
        self.reach.insert(t.clone(), acc.clone());
        acc
    }

    /// `D_q(height)` for the state with index `q`, in (height, size, text)
    /// order.
    pub fn trees_to(&mut self, q: usize, height: usize) -> Arc<Vec<Tree>> {
        if let Some(r) = self.lang.get(&(q, height)) {
            return r.clone();
        }
        let a = self.a;
        let mut found: HashSet<Tree> = HashSet::new();
        for i in 0..a.rules().len() {
            let compiled = a.compiled(i);
            let rule = a.rule(i);
            if compiled.target != q || rule.lhs().height() > height {
                continue;
            }
            let positions = rule.state_positions();
            // Classes over state-position indices, singletons included.
            let mut classes: Vec<Vec<usize>> = compiled.classes.clone();
            let constrained: HashSet<usize> = classes.iter().flatten().copied().collect();
            classes.extend((0..positions.len()).filter(|j| !constrained.contains(j)).map(|j| vec![j]));

            let mut choices: Vec<Vec<Tree>> = Vec::with_capacity(classes.len());
            for class in &classes {
                let limit = class.iter().map(|&j| height - positions[j].len()).min().expect("classes are nonempty");
                let source = class
                    .iter()
                    .copied()
                    .find(|&j| !a.is_sink(rule.state_at(j)))
                    .unwrap_or(class[0]);
                let candidates = self.trees_to(compiled.states[source], limit);
                let mut keep = Vec::new();
                for t in candidates.iter() {
                    let r = self.reachable(t);
                    if class.iter().all(|&j| r[compiled.states[j]]) {
                        keep.push(t.clone());
                    }
                }
                choices.push(keep);
            }
            for assignment in product_of(&choices) {
                let mut fill = vec![Tree::state(""); positions.len()];
                for (class, t) in classes.iter().zip(&assignment) {
                    for &j in class {
                        fill[j] = t.clone();
                    }
                }
                found.insert(fill_states(rule.lhs(), &fill));
            }
        }
        let mut out: Vec<Tree> = found.into_iter().collect();
        sort_trees(&mut out);
        let out = Arc::new(out);
        self.lang.insert((q, height), out.clone());
        out
    }

    /// `D_F(height)`: trees with a run to some final state.
    pub fn trees_to_finals(&mut self, height: usize) -> Vec<Tree> {
        let a = self.a;
        let mut all: Vec<Tree> = Vec::new();
        for f in a.finals() {
            let q = a.state_index(f).expect("finals are states");
            all.extend(self.trees_to(q, height).iter().cloned());
        }
        sort_trees(&mut all);
        all
    }
}

/// An upper bound on `|D_F(height)|`, computed by counting rule
/// instantiations without materializing trees. Saturates at `u128::MAX`.
pub fn domain_size_bound(a: &Automaton, height: usize) -> u128 {
    fn count(a: &Automaton, q: usize, height: usize, memo: &mut HashMap<(usize, usize), u128>) -> u128 {
        if let Some(&n) = memo.get(&(q, height)) {
            return n;
        }
        let mut total: u128 = 0;
        for i in 0..a.rules().len() {
            let compiled = a.compiled(i);
            let rule = a.rule(i);
            if compiled.target != q || rule.lhs().height() > height {
                continue;
            }
            let positions = rule.state_positions();
            let constrained: HashSet<usize> = compiled.classes.iter().flatten().copied().collect();
            let mut n: u128 = 1;
            for class in compiled.classes.iter().cloned().chain((0..positions.len()).filter(|j| !constrained.contains(j)).map(|j| vec![j])) {
                let limit = class.iter().map(|&j| height - positions[j].len()).min().expect("classes are nonempty");
                let source = class.iter().copied().find(|&j| !a.is_sink(rule.state_at(j))).unwrap_or(class[0]);
                n = n.saturating_mul(count(a, compiled.states[source], limit, memo));
            }
            total = total.saturating_add(n);
        }
        memo.insert((q, height), total);
        total
    }
    let mut memo = HashMap::new();
    a.finals()
        .iter()
        .map(|f| count(a, a.state_index(f).expect("finals are states"), height, &mut memo))
        .fold(0u128, u128::saturating_add)
}

/// Trees of height ≤ `bound` that may carry weight or accepting runs.
pub fn accepting_candidates(a: &Automaton, bound: usize) -> Vec<Tree> {
    TreeDomain::new(a).trees_to_finals(bound)
}

/// Searches for a tree of height ≤ `bound` with two or more accepting runs.
pub fn check_unambiguous(a: &Automaton, bound: usize) -> Verdict {
    let mut runs = RunEnumerator::new(a);
    for t in accepting_candidates(a, bound) {
        let accepting = runs.accepting(&t);
        if accepting.len() > 1 {
            return Verdict::witness(
                bound,
                Witness::Ambiguous { tree: t, runs: accepting.iter().map(|r| r.to_string()).collect() },
            );
        }
    }
    Verdict::ok(bound)
}

/// `(t, wt_A(t))` for every tree of height ≤ `bound` with nonzero weight.
pub fn support_up_to(a: &Automaton, bound: usize) -> Vec<(Tree, Weight)> {
    let mut eval = Evaluator::new(a);
    accepting_candidates(a, bound)
        .into_iter()
        .filter_map(|t| {
            let w = eval.evaluate(&t);
            (!w.is_zero()).then_some((t, w))
        })
        .collect()
}

/// `(t, wt^q(t))` for every tree of height ≤ `bound` with nonzero weight.
pub fn state_language_up_to(a: &Automaton, q: &str, bound: usize) -> Result<Vec<(Tree, Weight)>, AutomatonError> {
    let qi = a.state_index(q).ok_or_else(|| AutomatonError::UndeclaredState(q.to_string()))?;
    let mut domain = TreeDomain::new(a);
    let mut eval = Evaluator::new(a);
    Ok(domain
        .trees_to(qi, bound)
        .iter()
        .filter_map(|t| {
            let w = eval.weights(t)[qi].clone();
            (!w.is_zero()).then(|| (t.clone(), w))
        })
        .collect())
}
