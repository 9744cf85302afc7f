//! Bounded analyses: h-unambiguity, series equivalence and run counts.
//!
//! Every analysis inspects trees up to a height bound and reports the bound
//! with its verdict. An `ok` verdict never claims more than that bound.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::automaton::{Automaton, Evaluator, RunEnumerator, TreeDomain};
use crate::construct::{linearize, ConstructError};
use crate::hom::{group_by_image, TreeHomomorphism};
use crate::semiring::{Semiring, Weight};
use crate::term::{sort_trees, Position, RankedAlphabet, Symbol, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("expected a WTA, got a {0}")]
    NotWta(String),
    #[error("alphabets differ: `{left}` vs `{right}`")]
    AlphabetMismatch { left: RankedAlphabet, right: RankedAlphabet },
    #[error("semirings differ: {0} vs {1}")]
    SemiringMismatch(Semiring, Semiring),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// Evidence that a bounded check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two trees with the same image violating tetris-freeness. `position`
    /// is `None` when their position sets differ.
    TetrisViolation { left: Tree, right: Tree, image: Tree, position: Option<Position> },
    /// A tree with more than one accepting run.
    Ambiguous { tree: Tree, runs: Vec<String> },
    /// Accepting runs on trees with a common image that disagree on the
    /// state at `position`; `right_state` is `None` when `position` is not
    /// a position of `right`.
    HAmbiguous {
        left: Tree,
        right: Tree,
        image: Tree,
        position: Position,
        left_state: Symbol,
        right_state: Option<Symbol>,
    },
    /// A tree on which two series differ.
    ValueMismatch { tree: Tree, left: Weight, right: Weight },
    /// A tree with more accepting runs in the linearization than in the
    /// original automaton.
    RunCount { tree: Tree, linearized: usize, original: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::TetrisViolation { left, right, image, position } => {
                write!(f, "{left} and {right} share the image {image} but ")?;
                match position {
                    Some(p) => write!(f, "differ at position {p}"),
                    None => f.write_str("have different positions"),
                }
            }
            Witness::Ambiguous { tree, runs } => {
                write!(f, "{tree} has {} accepting runs: {}", runs.len(), runs.join(", "))
            }
            Witness::HAmbiguous { left, right, image, position, left_state, right_state } => {
                let right_state = right_state.as_deref().unwrap_or("(no position)");
                write!(
                    f,
                    "{left} and {right} share the image {image} but their runs reach {left_state} vs {right_state} at position {position}"
                )
            }
            Witness::ValueMismatch { tree, left, right } => write!(f, "{tree}: {left} vs {right}"),
            Witness::RunCount { tree, linearized, original } => {
                write!(f, "{tree}: {linearized} accepting runs after linearization, {original} before")
            }
        }
    }
}

/// Result of a bounded check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    bound: usize,
    witness: Option<Witness>,
}

impl Verdict {
    pub fn ok(bound: usize) -> Verdict {
        Verdict { bound, witness: None }
    }

    pub fn witness(bound: usize, witness: Witness) -> Verdict {
        Verdict { bound, witness: Some(witness) }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_ok(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness_ref(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    pub fn into_witness(self) -> Option<Witness> {
        self.witness
    }

    /// `ok` or `witness`.
    pub fn status(&self) -> &'static str {
        if self.is_ok() {
            "ok"
        } else {
            "witness"
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "ok up to height {}", self.bound),
            Some(w) => write!(f, "witness (height bound {}): {w}", self.bound),
        }
    }
}

/// Checks h-unambiguity on source trees of height ≤ `bound`: for
/// trees `s`, `s′` with `h(s) = h(s′)` and accepting runs `ρ`, `ρ′`, the
/// states reached at every position of `s` must coincide. Pairs with
/// `s = s′` are included, so ambiguity is reported too.
pub fn check_h_unambiguous(a: &Automaton, h: &TreeHomomorphism, bound: usize) -> Result<Verdict, AnalyzeError> {
    if !a.is_wta() {
        return Err(AnalyzeError::NotWta(a.kind().to_string()));
    }
    if a.alphabet() != h.source() {
        return Err(AnalyzeError::AlphabetMismatch { left: a.alphabet().clone(), right: h.source().clone() });
    }
    let mut runs = RunEnumerator::new(a);
    let candidates = TreeDomain::new(a).trees_to_finals(bound);
    let accepted: Vec<(Tree, Vec<BTreeMap<Position, Symbol>>)> = candidates
        .into_iter()
        .filter_map(|s| {
            let maps: Vec<_> = runs.accepting(&s).iter().map(|r| r.targets_by_position(a)).collect();
            (!maps.is_empty()).then_some((s, maps))
        })
        .collect();
    let labelings: std::collections::HashMap<Tree, Vec<BTreeMap<Position, Symbol>>> =
        accepted.iter().cloned().collect();
    let groups = group_by_image(h, accepted.into_iter().map(|(s, _)| s).collect());
    for (image, members) in groups {
        for (i, s) in members.iter().enumerate() {
            for s2 in &members[i..] {
                for left in &labelings[s] {
                    for right in &labelings[s2] {
                        for (p, q) in left {
                            let q2 = right.get(p);
                            if q2 != Some(q) {
                                return Ok(Verdict::witness(
                                    bound,
                                    Witness::HAmbiguous {
                                        left: s.clone(),
                                        right: s2.clone(),
                                        image: image.clone(),
                                        position: p.clone(),
                                        left_state: q.clone(),
                                        right_state: q2.cloned(),
                                    },
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::ok(bound))
}

fn same_signature(a: &Automaton, b: &Automaton) -> Result<(), AnalyzeError> {
    if a.semiring() != b.semiring() {
        return Err(AnalyzeError::SemiringMismatch(a.semiring(), b.semiring()));
    }
    if a.alphabet() != b.alphabet() {
        return Err(AnalyzeError::AlphabetMismatch { left: a.alphabet().clone(), right: b.alphabet().clone() });
    }
    Ok(())
}

/// Trees of height ≤ `bound` on which either automaton may be nonzero.
fn joint_candidates(a: &Automaton, b: &Automaton, bound: usize) -> Vec<Tree> {
    let mut trees = TreeDomain::new(a).trees_to_finals(bound);
    trees.extend(TreeDomain::new(b).trees_to_finals(bound));
    sort_trees(&mut trees);
    trees
}

/// Compares `⟦A⟧` and `⟦B⟧` on every tree of height ≤ `bound`.
pub fn bounded_equivalence(a: &Automaton, b: &Automaton, bound: usize) -> Result<Verdict, AnalyzeError> {
    same_signature(a, b)?;
    let (mut ea, mut eb) = (Evaluator::new(a), Evaluator::new(b));
    for t in joint_candidates(a, b, bound) {
        let (left, right) = (ea.evaluate(&t), eb.evaluate(&t));
        if left != right {
            return Ok(Verdict::witness(bound, Witness::ValueMismatch { tree: t, left, right }));
        }
    }
    Ok(Verdict::ok(bound))
}

/// Checks that `linearize(A, lin_height)` has at most as many accepting
/// runs as `A` on every tree of height ≤ `bound`.
pub fn run_count_compare(a: &Automaton, lin_height: usize, bound: usize) -> Result<Verdict, AnalyzeError> {
    let lin = linearize(a, lin_height)?;
    let (mut ra, mut rl) = (RunEnumerator::new(a), RunEnumerator::new(&lin));
    for t in joint_candidates(a, &lin, bound) {
        let original = ra.accepting(&t).len();
        let linearized = rl.accepting(&t).len();
        if linearized > original {
            return Ok(Verdict::witness(bound, Witness::RunCount { tree: t, linearized, original }));
        }
    }
    Ok(Verdict::ok(bound))
}
