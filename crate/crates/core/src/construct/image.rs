//! The eq-restricted WTAh recognizing the homomorphic image of a WTA.
//!
//! A rule `σ(q1, …, qk) → q` with `h(σ) = u` becomes `u⟦q1, …, qk⟧ -E-> q`,
//! where the ≤lex-least occurrence of each `x_i` in `u` is replaced by `q_i`,
//! every other occurrence by the sink `⊥`, and `E` relates all occurrences
//! of the same variable. The sink accepts every tree with weight one.

use std::collections::{BTreeMap, HashMap};

use super::ConstructError;
use crate::automaton::{fresh_name, Automaton, Partition, Run, RunEnumerator};
use crate::hom::TreeHomomorphism;
use crate::semiring::Weight;
use crate::term::{Label, RankedAlphabet, Symbol, Tree};

fn check_input(a: &Automaton, h: &TreeHomomorphism) -> Result<(), ConstructError> {
    if !a.is_wta() {
        return Err(ConstructError::NotWta(a.kind().to_string()));
    }
    if a.alphabet() != h.source() {
        return Err(ConstructError::AlphabetMismatch { automaton: a.alphabet().clone(), hom: h.source().clone() });
    }
    Ok(())
}

fn sink_name(a: &Automaton, h: &TreeHomomorphism) -> Symbol {
    fresh_name("bot", &|n| a.state(n).is_some() || h.target().contains(n))
}

/// `u⟦q1, …, qk⟧` and `E` for `u = h(σ)`.
fn image_lhs(u: &Tree, states: &[Symbol], sink: &Symbol) -> (Tree, Partition) {
    fn go(t: &Tree, states: &[Symbol], sink: &Symbol, seen: &mut [bool]) -> Tree {
        match t.label() {
            // Preorder meets positions in ≤lex order, so the first visit of
            // `x_i` is its least occurrence.
            Label::Var(i) => {
                let first = !std::mem::replace(&mut seen[i - 1], true);
                Tree::leaf(Label::State(if first { states[i - 1].clone() } else { sink.clone() }))
            }
            label => Tree::new(label.clone(), t.children().iter().map(|c| go(c, states, sink, seen)).collect()),
        }
    }
    let lhs = go(u, states, sink, &mut vec![false; states.len()]);
    let classes = (1..=states.len()).map(|i| u.positions_of(&Label::Var(i))).collect();
    (lhs, Partition::from_classes(classes))
}

fn sink_rules(target: &RankedAlphabet, sink: &Symbol, a: &Automaton) -> Vec<(Tree, Partition, Symbol, Weight)> {
    target
        .iter()
        .map(|(d, k)| {
            let lhs = Tree::new(Label::Sym(d.clone()), vec![Tree::leaf(Label::State(sink.clone())); k]);
            (lhs, Partition::identity(), sink.clone(), a.semiring().one())
        })
        .collect()
}

fn image_states(a: &Automaton, sink: &Symbol) -> Vec<Symbol> {
    let mut states = a.states().to_vec();
    states.push(sink.clone());
    states
}

/// The eq-restricted WTAh `A′` with `⟦A′⟧ = h_⟦A⟧`. Rules that coincide
/// after dropping the source-rule annotation are merged by adding their
/// weights.
pub fn hom_image(a: &Automaton, h: &TreeHomomorphism) -> Result<Automaton, ConstructError> {
    check_input(a, h)?;
    let sink = sink_name(a, h);
    let mut rules = Vec::new();
    for r in a.rules() {
        let Label::Sym(sigma) = r.lhs().label() else { unreachable!("WTA rules start with a symbol") };
        let u = h.image_of(sigma).expect("validated homomorphism covers the source alphabet");
        let states: Vec<Symbol> = r.states().cloned().collect();
        let (lhs, partition) = image_lhs(u, &states, &sink);
        rules.push((lhs, partition, r.target().clone(), r.weight().clone()));
    }
    rules.extend(sink_rules(h.target(), &sink, a));
    Ok(Automaton::from_parts(
        a.semiring(),
        h.target().clone(),
        image_states(a, &sink),
        Some(sink),
        a.finals().clone(),
        rules,
    ))
}

/// The intermediate automaton over `Δ ∪ Δ × R`, in which the root symbol of
/// every image rule carries the index of its source rule, together with
/// the relabeling back to `Δ`.
#[derive(Debug, Clone)]
pub struct AnnotatedImage {
    pub automaton: Automaton,
    pub relabeling: BTreeMap<Symbol, Symbol>,
}

/// Builds the annotated intermediate automaton. Relabeling it with
/// [`relabel_symbols`] gives the same automaton as [`hom_image`].
pub fn hom_image_annotated(a: &Automaton, h: &TreeHomomorphism) -> Result<AnnotatedImage, ConstructError> {
    check_input(a, h)?;
    let sink = sink_name(a, h);
    let mut alphabet = h.target().clone();
    let mut relabeling = BTreeMap::new();
    let mut rules = Vec::new();
    for (j, r) in a.rules().iter().enumerate() {
        let Label::Sym(sigma) = r.lhs().label() else { unreachable!("WTA rules start with a symbol") };
        let u = h.image_of(sigma).expect("validated homomorphism covers the source alphabet");
        let Label::Sym(delta) = u.label() else { unreachable!("nonerasing images start with a symbol") };
        let pair = fresh_name(&format!("{delta}__r{j}"), &|n| alphabet.contains(n));
        alphabet.insert(&pair, u.children().len()).expect("fresh symbol");
        relabeling.insert(pair.clone(), delta.clone());
        let states: Vec<Symbol> = r.states().cloned().collect();
        let (lhs, partition) = image_lhs(u, &states, &sink);
        let lhs = Tree::new(Label::Sym(pair), lhs.children().to_vec());
        rules.push((lhs, partition, r.target().clone(), r.weight().clone()));
    }
    rules.extend(sink_rules(h.target(), &sink, a));
    let automaton =
        Automaton::from_parts(a.semiring(), alphabet, image_states(a, &sink), Some(sink), a.finals().clone(), rules);
    Ok(AnnotatedImage { automaton, relabeling })
}

/// Applies a symbol relabeling to every left-hand side, merging rules that
/// become identical by adding their weights. Symbols not in `map` are kept.
pub fn relabel_symbols(a: &Automaton, map: &BTreeMap<Symbol, Symbol>, alphabet: RankedAlphabet) -> Automaton {
    let rename = |t: &Tree| -> Tree {
        fn go(t: &Tree, map: &BTreeMap<Symbol, Symbol>) -> Tree {
            let label = match t.label() {
                Label::Sym(s) => Label::Sym(map.get(s).cloned().unwrap_or_else(|| s.clone())),
                other => other.clone(),
            };
            Tree::new(label, t.children().iter().map(|c| go(c, map)).collect())
        }
        go(t, map)
    };
    let rules = a
        .rules()
        .iter()
        .map(|r| (rename(r.lhs()), r.constraint().clone(), r.target().clone(), r.weight().clone()))
        .collect();
    Automaton::from_parts(
        a.semiring(),
        alphabet,
        a.states().to_vec(),
        a.sink().cloned(),
        a.finals().clone(),
        rules,
    )
}

/// Maps a run of `a` on `s` to the corresponding run of `image` (which must
/// be `hom_image(a, h)`) on `h(s)`. The leading occurrence of each variable
/// continues with the mapped child run; other occurrences get the unique
/// run of the sink on the copied subtree.
pub fn run_image(a: &Automaton, h: &TreeHomomorphism, image: &Automaton, run: &Run) -> Result<Run, ConstructError> {
    check_input(a, h)?;
    let sink = image.sink().cloned().ok_or(ConstructError::ForeignRun)?;
    let sink_idx = image.state_index(&sink).expect("sink is a state");
    let index: HashMap<(Tree, Partition, Symbol), usize> =
        image.rules().iter().enumerate().map(|(i, r)| (r.key(), i)).collect();
    let mut sink_runs = RunEnumerator::new(image);
    map_run(a, h, image, run, &sink, sink_idx, &index, &mut sink_runs)
}

#[allow(clippy::too_many_arguments)]
fn map_run(
    a: &Automaton,
    h: &TreeHomomorphism,
    image: &Automaton,
    run: &Run,
    sink: &Symbol,
    sink_idx: usize,
    index: &HashMap<(Tree, Partition, Symbol), usize>,
    sink_runs: &mut RunEnumerator<'_>,
) -> Result<Run, ConstructError> {
    if run.rule() >= a.rules().len() {
        return Err(ConstructError::ForeignRun);
    }
    let r = a.rule(run.rule());
    let Label::Sym(sigma) = r.lhs().label() else { return Err(ConstructError::ForeignRun) };
    let u = h.image_of(sigma).ok_or(ConstructError::ForeignRun)?;
    let states: Vec<Symbol> = r.states().cloned().collect();
    let (lhs, partition) = image_lhs(u, &states, sink);
    let key = (lhs, partition, r.target().clone());
    let &rule = index.get(&key).ok_or(ConstructError::ForeignRun)?;

    let subject = run.subject();
    let mut mapped: Vec<Option<Run>> = Vec::with_capacity(run.children().len());
    for child in run.children() {
        mapped.push(Some(map_run(a, h, image, child, sink, sink_idx, index, sink_runs)?));
    }
    let mut children = Vec::new();
    for p in image.rule(rule).state_positions() {
        let Some(Label::Var(i)) = u.label_at(p) else { unreachable!("state positions come from variables") };
        match mapped[i - 1].take() {
            Some(leading) => children.push(leading),
            None => {
                let copy = h.apply(&subject.children()[i - 1]);
                let bot = sink_runs.runs(&copy, sink_idx);
                children.push(bot.first().cloned().ok_or(ConstructError::ForeignRun)?);
            }
        }
    }
    Ok(Run::assemble(image, rule, h.apply(subject), children))
}
