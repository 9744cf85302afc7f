//! Nondeleting, nonerasing tree homomorphisms.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::analyze::{Verdict, Witness};
use crate::term::{enumerate_trees, product_of, Label, Position, RankedAlphabet, Symbol, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("no image given for symbol `{0}`")]
    MissingSymbol(String),
    #[error("image given for `{0}`, which is not in the source alphabet")]
    UnknownSource(String),
    #[error("image of `{symbol}` uses variable x{var} outside x1..x{rank}")]
    StrayVariable { symbol: String, var: usize, rank: usize },
    #[error("image of `{symbol}/{rank}` is deleting: x{missing} does not occur")]
    Deleting { symbol: String, rank: usize, missing: usize },
    #[error("image of `{0}` is a bare variable (erasing)")]
    Erasing(String),
    #[error("image of `{symbol}` is not a tree over the target alphabet: {reason}")]
    BadImage { symbol: String, reason: String },
}

/// A tree homomorphism `h: T_Σ → T_Δ` given by one image per source symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeHomomorphism {
    source: RankedAlphabet,
    target: RankedAlphabet,
    images: BTreeMap<Symbol, Tree>,
}

fn check_image(symbol: &str, rank: usize, image: &Tree, target: &RankedAlphabet) -> Result<(), HomError> {
    fn walk(t: &Tree, symbol: &str, rank: usize, target: &RankedAlphabet) -> Result<(), HomError> {
        match t.label() {
            Label::Var(i) => {
                if *i == 0 || *i > rank {
                    return Err(HomError::StrayVariable { symbol: symbol.into(), var: *i, rank });
                }
                Ok(())
            }
            Label::State(s) => Err(HomError::BadImage {
                symbol: symbol.into(),
                reason: format!("state `{s}` in image"),
            }),
            Label::Sym(s) => {
                match target.rank(s) {
                    None => {
                        return Err(HomError::BadImage {
                            symbol: symbol.into(),
                            reason: format!("unknown target symbol `{s}`"),
                        })
                    }
                    Some(r) if r != t.children().len() => {
                        return Err(HomError::BadImage {
                            symbol: symbol.into(),
                            reason: format!("`{s}` has rank {r}"),
                        })
                    }
                    Some(_) => {}
                }
                t.children().iter().try_for_each(|c| walk(c, symbol, rank, target))
            }
        }
    }
    if matches!(image.label(), Label::Var(_)) {
        return Err(HomError::Erasing(symbol.into()));
    }
    walk(image, symbol, rank, target)?;
    let vars = image.vars();
    if let Some(missing) = (1..=rank).find(|i| !vars.contains(i)) {
        return Err(HomError::Deleting { symbol: symbol.into(), rank, missing });
    }
    Ok(())
}

impl TreeHomomorphism {
    /// Validates and builds a homomorphism. Every source symbol needs an
    /// image that is neither a bare variable (erasing) nor missing one of
    /// its variables (deleting).
    pub fn new(
        source: RankedAlphabet,
        target: RankedAlphabet,
        images: impl IntoIterator<Item = (Symbol, Tree)>,
    ) -> Result<Self, HomError> {
        let images: BTreeMap<Symbol, Tree> = images.into_iter().collect();
        for name in images.keys() {
            if !source.contains(name) {
                return Err(HomError::UnknownSource(name.to_string()));
            }
        }
        for (sym, rank) in source.iter() {
            let image = images.get(sym).ok_or_else(|| HomError::MissingSymbol(sym.to_string()))?;
            check_image(sym, rank, image, &target)?;
        }
        Ok(TreeHomomorphism { source, target, images })
    }

    /// `σ ↦ σ(x1, …, xk)` on the given alphabet.
    pub fn identity(alphabet: &RankedAlphabet) -> Self {
        let images = alphabet
            .iter()
            .map(|(s, r)| (s.clone(), Tree::new(Label::Sym(s.clone()), (1..=r).map(Tree::var).collect())))
            .collect();
        TreeHomomorphism { source: alphabet.clone(), target: alphabet.clone(), images }
    }

    pub fn source(&self) -> &RankedAlphabet {
        &self.source
    }

    pub fn target(&self) -> &RankedAlphabet {
        &self.target
    }

    pub fn image_of(&self, symbol: &str) -> Option<&Tree> {
        self.images.get(symbol)
    }

    pub fn images(&self) -> impl Iterator<Item = (&Symbol, &Tree)> {
        self.images.iter()
    }

    /// `h(σ(s1, …, sk)) = h(σ)[x1 ← h(s1), …, xk ← h(sk)]`.
    ///
    /// Panics if `s` uses a symbol outside the source alphabet.
    pub fn apply(&self, s: &Tree) -> Tree {
        let Label::Sym(sym) = s.label() else {
            panic!("homomorphisms apply to ground trees only, got `{s}`");
        };
        let image = self
            .images
            .get(sym)
            .unwrap_or_else(|| panic!("symbol `{sym}` is not in the source alphabet"));
        let args: Vec<Tree> = s.children().iter().map(|c| self.apply(c)).collect();
        image.instantiate(&args)
    }

    /// `h⁻¹(t)`, sorted by (size, term text).
    pub fn preimage(&self, t: &Tree) -> Vec<Tree> {
        Preimages::new(self).of(t).as_ref().clone()
    }

    /// Whether `h` is injective on all source trees of height ≤ `bound`.
    pub fn is_injective_up_to(&self, bound: usize) -> bool {
        let mut seen = HashMap::new();
        enumerate_trees(&self.source, bound)
            .into_iter()
            .all(|s| seen.insert(self.apply(&s), ()).is_none())
    }
}

/// Memoized preimage computation.
///
/// Matches each symbol image against `t` top-down; variables bind to
/// proper subtrees (the homomorphism is nonerasing), repeated variables must
/// bind equal subtrees, and the preimages of the bindings are combined.
pub struct Preimages<'h> {
    hom: &'h TreeHomomorphism,
    memo: HashMap<Tree, Arc<Vec<Tree>>>,
}

fn bind(pattern: &Tree, t: &Tree, bindings: &mut [Option<Tree>]) -> bool {
    match pattern.label() {
        Label::Var(i) => match &bindings[i - 1] {
            Some(b) => b == t,
            None => {
                bindings[i - 1] = Some(t.clone());
                true
            }
        },
        label => {
            label == t.label()
                && pattern.children().len() == t.children().len()
                && pattern
                    .children()
                    .iter()
                    .zip(t.children())
                    .all(|(p, c)| bind(p, c, bindings))
        }
    }
}

impl<'h> Preimages<'h> {
    pub fn new(hom: &'h TreeHomomorphism) -> Self {
        Preimages { hom, memo: HashMap::new() }
    }

    pub fn of(&mut self, t: &Tree) -> Arc<Vec<Tree>> {
        if let Some(hit) = self.memo.get(t) {
            return hit.clone();
        }
        let mut out = Vec::new();
        for (sym, rank) in self.hom.source.iter() {
            let image = &self.hom.images[sym];
            let mut bindings = vec![None; rank];
            if !bind(image, t, &mut bindings) {
                continue;
            }
            let choices: Vec<Vec<Tree>> = bindings
                .into_iter()
                .map(|b| self.of(&b.expect("nondeleting images bind every variable")).as_ref().clone())
                .collect();
            for args in product_of(&choices) {
                out.push(Tree::new(Label::Sym(sym.clone()), args));
            }
        }
        out.sort_by_cached_key(|s| (s.size(), s.to_string()));
        let out = Arc::new(out);
        self.memo.insert(t.clone(), out.clone());
        out
    }
}

/// Groups all source trees of height ≤ `bound` by their image, in
/// (image order, member order).
pub(crate) fn group_by_image(hom: &TreeHomomorphism, trees: Vec<Tree>) -> Vec<(Tree, Vec<Tree>)> {
    let mut groups: HashMap<Tree, Vec<Tree>> = HashMap::new();
    let mut order: Vec<Tree> = Vec::new();
    for s in trees {
        let image = hom.apply(&s);
        let entry = groups.entry(image.clone()).or_default();
        if entry.is_empty() {
            order.push(image);
        }
        entry.push(s);
    }
    order.sort_by_cached_key(Tree::order_key);
    order
        .into_iter()
        .map(|img| {
            let members = groups.remove(&img).unwrap_or_default();
            (img, members)
        })
        .collect()
}

/// Searches for a violation of tetris-freeness among source trees of height
/// ≤ `height_bound`: two trees with the same image must have the same
/// positions and, position by position, symbols with identical images.
///
/// An `ok` verdict only covers the bound.
pub fn check_tetris_free(hom: &TreeHomomorphism, height_bound: usize) -> Verdict {
    let trees = enumerate_trees(&hom.source, height_bound);
    for (image, members) in group_by_image(hom, trees) {
        for (i, s) in members.iter().enumerate() {
            for s2 in &members[i + 1..] {
                if let Some(position) = tetris_violation(hom, s, s2) {
                    return Verdict::witness(
                        height_bound,
                        Witness::TetrisViolation {
                            left: s.clone(),
                            right: s2.clone(),
                            image: image.clone(),
                            position,
                        },
                    );
                }
            }
        }
    }
    Verdict::ok(height_bound)
}

/// `None` when the pair is harmless; `Some(None)` when the position sets
/// differ; `Some(Some(p))` for the first position whose symbol images differ.
pub(crate) fn tetris_violation(hom: &TreeHomomorphism, s: &Tree, s2: &Tree) -> Option<Option<Position>> {
    let ps = s.positions();
    if ps != s2.positions() {
        return Some(None);
    }
    for p in ps {
        let (Some(Label::Sym(a)), Some(Label::Sym(b))) = (s.label_at(&p), s2.label_at(&p)) else {
            return Some(Some(p));
        };
        if hom.images.get(a) != hom.images.get(b) {
            return Some(Some(p));
        }
    }
    None
}
