//! Weighted tree automata with hom-constraints (WTAh).
//!
//! A rule `ℓ -E->_w q` has a deep left-hand side over symbols and states, an
//! equivalence relation `E` on the state positions of `ℓ`, a target state
//! and a nonzero weight. The automaton is a WTG when every `E` is the
//! identity and a WTA when, in addition, every left-hand side has depth one.

mod canonical;
mod run;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::semiring::{Semiring, Weight};
use crate::term::{Label, Position, RankedAlphabet, Symbol, Tree};

pub use canonical::CanonicalForm;
pub use run::{
    accepting_candidates, check_unambiguous, domain_size_bound, evaluate, runs_to_state, state_language_up_to,
    support_up_to, Evaluator, Run, RunEnumerator, TreeDomain,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("state `{0}` clashes with an alphabet symbol")]
    StateIsSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` used with {found} argument(s), rank is {expected}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("left-hand side of rule {rule} is a bare state")]
    BareStateLhs { rule: usize },
    #[error("left-hand side of rule {rule} contains a variable")]
    VariableInLhs { rule: usize },
    #[error("constraint position {position} of rule {rule} is not a state position of its left-hand side")]
    ConstraintPosition { rule: usize, position: Position },
    #[error("rule {rule} has the zero weight")]
    ZeroWeight { rule: usize },
    #[error("rule {rule} is over {found}, automaton is over {expected}")]
    SemiringMismatch { rule: usize, expected: Semiring, found: Semiring },
    #[error("sink state `{0}` must not be final")]
    FinalSink(String),
    #[error("rule {rule} duplicates rule {first}")]
    DuplicateRule { rule: usize, first: usize },
}

/// An equivalence relation on positions, stored as its nontrivial classes.
///
/// Each class is sorted in ≤lex order and classes are sorted by their least
/// element, so equal relations have equal representations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    classes: Vec<Vec<Position>>,
}

impl Partition {
    pub fn identity() -> Partition {
        Partition::default()
    }

    /// Closes a list of pairs under reflexivity, symmetry and transitivity.
    pub fn from_pairs(pairs: &[(Position, Position)]) -> Partition {
        let mut classes: Vec<BTreeSet<Position>> = Vec::new();
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let hits: Vec<usize> = classes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(a) || c.contains(b))
                .map(|(i, _)| i)
                .collect();
            let mut merged: BTreeSet<Position> = [a.clone(), b.clone()].into();
            for i in hits.into_iter().rev() {
                merged.extend(classes.remove(i));
            }
            classes.push(merged);
        }
        Partition::from_classes(classes.into_iter().map(|c| c.into_iter().collect()).collect())
    }

    /// Builds a partition from (possibly singleton) classes.
    pub fn from_classes(classes: Vec<Vec<Position>>) -> Partition {
        let mut classes: Vec<Vec<Position>> = classes
            .into_iter()
            .map(|mut c| {
                c.sort();
                c.dedup();
                c
            })
            .filter(|c| c.len() > 1)
            .collect();
        classes.sort();
        Partition { classes }
    }

    pub fn classes(&self) -> &[Vec<Position>] {
        &self.classes
    }

    pub fn is_identity(&self) -> bool {
        self.classes.is_empty()
    }

    /// The class of `p`, or `None` when `p` is only related to itself.
    pub fn class_of(&self, p: &Position) -> Option<&[Position]> {
        self.classes.iter().find(|c| c.contains(p)).map(Vec::as_slice)
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.classes.iter().flatten()
    }

    /// Generating pairs `(min, other)` per class.
    pub fn pairs(&self) -> Vec<(Position, Position)> {
        self.classes
            .iter()
            .flat_map(|c| c[1..].iter().map(move |p| (c[0].clone(), p.clone())))
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|(a, b)| format!("{a} = {b}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// A validated rule `ℓ -E->_w q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    lhs: Tree,
    constraint: Partition,
    target: Symbol,
    weight: Weight,
    q_positions: Vec<Position>,
}

impl Rule {
    pub fn lhs(&self) -> &Tree {
        &self.lhs
    }

    pub fn constraint(&self) -> &Partition {
        &self.constraint
    }

    pub fn target(&self) -> &Symbol {
        &self.target
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// `pos_Q(ℓ)` in ≤lex order.
    pub fn state_positions(&self) -> &[Position] {
        &self.q_positions
    }

    /// The state labelling the `i`-th state position.
    pub fn state_at(&self, i: usize) -> &Symbol {
        match self.lhs.label_at(&self.q_positions[i]) {
            Some(Label::State(s)) => s,
            _ => unreachable!("state positions are labelled by states"),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &Symbol> {
        (0..self.q_positions.len()).map(|i| self.state_at(i))
    }

    /// Rank of the rule as a run symbol: `|pos_Q(ℓ)|`.
    pub fn rank(&self) -> usize {
        self.q_positions.len()
    }

    /// True for flat rules `σ(q1, …, qk) → q` without constraints.
    pub fn is_flat(&self) -> bool {
        self.constraint.is_identity()
            && matches!(self.lhs.label(), Label::Sym(_))
            && self.lhs.children().iter().all(|c| c.label().is_state())
    }

    pub(crate) fn key(&self) -> (Tree, Partition, Symbol) {
        (self.lhs.clone(), self.constraint.clone(), self.target.clone())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} @ {}", self.lhs, self.target, self.weight)?;
        if !self.constraint.is_identity() {
            write!(f, " | {}", self.constraint)?;
        }
        Ok(())
    }
}

/// A rule as written, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRule {
    pub lhs: Tree,
    pub pairs: Vec<(Position, Position)>,
    pub target: Symbol,
    pub weight: Weight,
}

impl RawRule {
    pub fn new(lhs: Tree, pairs: Vec<(Position, Position)>, target: &str, weight: Weight) -> Self {
        RawRule { lhs, pairs, target: Arc::from(target), weight }
    }
}

/// An automaton as written, before validation.
#[derive(Debug, Clone)]
pub struct RawAutomaton {
    pub semiring: Semiring,
    pub alphabet: RankedAlphabet,
    pub states: Vec<Symbol>,
    pub sink: Option<Symbol>,
    pub finals: Vec<Symbol>,
    pub rules: Vec<RawRule>,
}

/// Structural class of an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Wta,
    Wtg,
    Wtah,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Wta => "WTA",
            Kind::Wtg => "WTG",
            Kind::Wtah => "WTAh",
        })
    }
}

/// Outcome of the eq-restriction test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EqRestriction {
    Yes,
    No(String),
}

impl EqRestriction {
    pub fn holds(&self) -> bool {
        matches!(self, EqRestriction::Yes)
    }
}

/// A validated WTAh `(Q, Σ, F, R, wt)` with an optional designated sink.
#[derive(Debug, Clone)]
pub struct Automaton {
    semiring: Semiring,
    alphabet: RankedAlphabet,
    states: Vec<Symbol>,
    sink: Option<Symbol>,
    finals: BTreeSet<Symbol>,
    rules: Vec<Rule>,
    state_index: HashMap<Symbol, usize>,
    rules_by_root: HashMap<Symbol, Vec<usize>>,
    compiled: Vec<CompiledRule>,
}

/// Index form of a rule used by the evaluators.
#[derive(Debug, Clone)]
pub(crate) struct CompiledRule {
    /// State index per state position.
    pub states: Vec<usize>,
    pub target: usize,
    /// Constraint classes as indices into the state positions.
    pub classes: Vec<Vec<usize>>,
}

impl Automaton {
    /// Checks every rule and declaration and builds the automaton.
    pub fn new(raw: RawAutomaton) -> Result<Automaton, AutomatonError> {
        let RawAutomaton { semiring, alphabet, states, sink, finals, rules } = raw;
        let mut state_index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if alphabet.contains(s) {
                return Err(AutomatonError::StateIsSymbol(s.to_string()));
            }
            if state_index.insert(s.clone(), i).is_some() {
                return Err(AutomatonError::DuplicateState(s.to_string()));
            }
        }
        let declared = |s: &Symbol| -> Result<(), AutomatonError> {
            if state_index.contains_key(s) {
                Ok(())
            } else {
                Err(AutomatonError::UndeclaredState(s.to_string()))
            }
        };
        if let Some(s) = &sink {
            declared(s)?;
            if finals.contains(s) {
                return Err(AutomatonError::FinalSink(s.to_string()));
            }
        }
        let mut final_set = BTreeSet::new();
        for f in &finals {
            declared(f)?;
            final_set.insert(f.clone());
        }

        let mut validated: Vec<Rule> = Vec::with_capacity(rules.len());
        let mut seen: HashMap<(Tree, Partition, Symbol), usize> = HashMap::new();
        for (idx, r) in rules.into_iter().enumerate() {
            check_lhs(&r.lhs, &alphabet, &state_index, idx)?;
            if r.lhs.label().is_state() {
                return Err(AutomatonError::BareStateLhs { rule: idx });
            }
            declared(&r.target)?;
            if r.weight.semiring() != semiring {
                return Err(AutomatonError::SemiringMismatch {
                    rule: idx,
                    expected: semiring,
                    found: r.weight.semiring(),
                });
            }
            if r.weight.is_zero() {
                return Err(AutomatonError::ZeroWeight { rule: idx });
            }
            let q_positions = r.lhs.state_positions();
            for (a, b) in &r.pairs {
                for p in [a, b] {
                    if !q_positions.contains(p) {
                        return Err(AutomatonError::ConstraintPosition { rule: idx, position: p.clone() });
                    }
                }
            }
            let rule = Rule {
                lhs: r.lhs,
                constraint: Partition::from_pairs(&r.pairs),
                target: r.target,
                weight: r.weight,
                q_positions,
            };
            if let Some(first) = seen.insert(rule.key(), idx) {
                return Err(AutomatonError::DuplicateRule { rule: idx, first });
            }
            validated.push(rule);
        }
        Ok(Automaton::assemble(semiring, alphabet, states, sink, final_set, validated))
    }

    fn assemble(
        semiring: Semiring,
        alphabet: RankedAlphabet,
        states: Vec<Symbol>,
        sink: Option<Symbol>,
        finals: BTreeSet<Symbol>,
        rules: Vec<Rule>,
    ) -> Automaton {
        let state_index: HashMap<Symbol, usize> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let compiled = rules
            .iter()
            .map(|r| CompiledRule {
                states: r.states().map(|s| state_index[s]).collect(),
                target: state_index[&r.target],
                classes: r
                    .constraint
                    .classes()
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|p| r.q_positions.binary_search(p).expect("constrained positions are state positions"))
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let mut rules_by_root: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if let Label::Sym(s) = r.lhs.label() {
                rules_by_root.entry(s.clone()).or_default().push(i);
            }
        }
        Automaton { semiring, alphabet, states, sink, finals, rules, state_index, rules_by_root, compiled }
    }

    /// Builds an automaton from parts produced by a construction. Rules that
    /// coincide in (lhs, constraint, target) are merged by adding their
    /// weights; rules whose weight ends up zero are dropped.
    pub(crate) fn from_parts(
        semiring: Semiring,
        alphabet: RankedAlphabet,
        states: Vec<Symbol>,
        sink: Option<Symbol>,
        finals: BTreeSet<Symbol>,
        rules: Vec<(Tree, Partition, Symbol, Weight)>,
    ) -> Automaton {
        let mut merged: Vec<(Tree, Partition, Symbol, Weight)> = Vec::new();
        let mut index: HashMap<(Tree, Partition, Symbol), usize> = HashMap::new();
        for (lhs, constraint, target, weight) in rules {
            let key = (lhs.clone(), constraint.clone(), target.clone());
            match index.get(&key) {
                Some(&i) => merged[i].3 = &merged[i].3 + &weight,
                None => {
                    index.insert(key, merged.len());
                    merged.push((lhs, constraint, target, weight));
                }
            }
        }
        let rules = merged
            .into_iter()
            .filter(|r| !r.3.is_zero())
            .map(|(lhs, constraint, target, weight)| {
                let q_positions = lhs.state_positions();
                Rule { lhs, constraint, target, weight, q_positions }
            })
            .collect();
        Automaton::assemble(semiring, alphabet, states, sink, finals, rules)
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[Symbol] {
        &self.states
    }

    pub fn sink(&self) -> Option<&Symbol> {
        self.sink.as_ref()
    }

    pub fn finals(&self) -> &BTreeSet<Symbol> {
        &self.finals
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, i: usize) -> &Rule {
        &self.rules[i]
    }

    pub fn is_final(&self, q: &str) -> bool {
        self.finals.contains(q)
    }

    pub fn is_sink(&self, q: &str) -> bool {
        self.sink.as_deref() == Some(q)
    }

    pub fn state_index(&self, q: &str) -> Option<usize> {
        self.state_index.get(q).copied()
    }

    pub fn state(&self, q: &str) -> Option<&Symbol> {
        self.state_index.get_key_value(q).map(|(k, _)| k)
    }

    pub(crate) fn compiled(&self, i: usize) -> &CompiledRule {
        &self.compiled[i]
    }

    pub(crate) fn rules_with_root(&self, symbol: &str) -> &[usize] {
        self.rules_by_root.get(symbol).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn kind(&self) -> Kind {
        if self.rules.iter().any(|r| !r.constraint.is_identity()) {
            Kind::Wtah
        } else if self.rules.iter().all(Rule::is_flat) {
            Kind::Wta
        } else {
            Kind::Wtg
        }
    }

    pub fn is_wta(&self) -> bool {
        self.kind() == Kind::Wta
    }

    pub fn is_wtg(&self) -> bool {
        self.kind() <= Kind::Wtg
    }

    /// Tests the eq-restriction discipline: a sink with exactly the rules
    /// `σ(⊥, …, ⊥) →₁ ⊥`, and in every other rule each constraint class
    /// holds exactly one non-sink state, all other members being the sink.
    pub fn is_eq_restricted(&self) -> EqRestriction {
        let Some(sink) = &self.sink else {
            return EqRestriction::No("no sink state".into());
        };
        let mut sink_rule_for: BTreeMap<&Symbol, usize> = BTreeMap::new();
        for r in self.rules.iter().filter(|r| &r.target == sink) {
            let Label::Sym(sym) = r.lhs.label() else { unreachable!() };
            let shaped = r.lhs.children().iter().all(|c| c.label() == &Label::State(sink.clone()));
            if !shaped || !r.weight.is_one() || !r.constraint.is_identity() {
                return EqRestriction::No(format!("rule `{r}` targets the sink but is not a sink rule"));
            }
            *sink_rule_for.entry(sym).or_default() += 1;
        }
        for (sym, _) in self.alphabet.iter() {
            if sink_rule_for.get(sym).copied().unwrap_or(0) != 1 {
                return EqRestriction::No(format!("missing sink rule for `{sym}`"));
            }
        }
        for r in self.rules.iter().filter(|r| &r.target != sink) {
            let mut classes: Vec<Vec<Position>> = r.constraint.classes().to_vec();
            classes.extend(
                r.q_positions
                    .iter()
                    .filter(|p| r.constraint.class_of(p).is_none())
                    .map(|p| vec![p.clone()]),
            );
            for members in classes {
                let leaders = members
                    .iter()
                    .filter(|m| r.lhs.label_at(m) != Some(&Label::State(sink.clone())))
                    .count();
                if leaders != 1 {
                    return EqRestriction::No(format!(
                        "rule `{r}`: constraint class of {} has {leaders} non-sink states",
                        members[0]
                    ));
                }
            }
        }
        EqRestriction::Yes
    }

    /// The canonical form used for equality of automata.
    pub fn canonical(&self) -> CanonicalForm {
        CanonicalForm::of(self)
    }

    /// Same automaton with states renamed `s0, s1, …` in order of first use.
    pub fn rename_states_by_first_use(&self) -> Automaton {
        canonical::rename_by_first_use(self)
    }

    /// Equality of canonical forms after first-use state renaming.
    pub fn isomorphic_to(&self, other: &Automaton) -> bool {
        self.rename_states_by_first_use().canonical() == other.rename_states_by_first_use().canonical()
    }
}

fn check_lhs(
    t: &Tree,
    alphabet: &RankedAlphabet,
    states: &HashMap<Symbol, usize>,
    rule: usize,
) -> Result<(), AutomatonError> {
    match t.label() {
        Label::Var(_) => Err(AutomatonError::VariableInLhs { rule }),
        Label::State(s) => {
            if !states.contains_key(s) {
                return Err(AutomatonError::UndeclaredState(s.to_string()));
            }
            if !t.is_leaf() {
                return Err(AutomatonError::Arity { symbol: s.to_string(), expected: 0, found: t.children().len() });
            }
            Ok(())
        }
        Label::Sym(s) => {
            let expected = alphabet.rank(s).ok_or_else(|| AutomatonError::UnknownSymbol(s.to_string()))?;
            if expected != t.children().len() {
                return Err(AutomatonError::Arity { symbol: s.to_string(), expected, found: t.children().len() });
            }
            t.children().iter().try_for_each(|c| check_lhs(c, alphabet, states, rule))
        }
    }
}

/// Picks `base`, or `base` with a numeric suffix, avoiding `taken`.
pub(crate) fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> Symbol {
    if !taken(base) {
        return Arc::from(base);
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .map(|n| Arc::from(n.as_str()))
        .expect("infinitely many candidates")
}
