//! Ranked alphabets, finite trees, positions and substitutions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub type Symbol = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has rank {expected} but is applied to {found} argument(s)")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("leaf token `{0}` cannot take arguments")]
    LeafWithArguments(String),
    #[error("position {position} is not a position of {tree}")]
    InvalidPosition { position: Position, tree: String },
    #[error("empty position set")]
    EmptyPositionSet,
    #[error("symbol `{0}` declared twice with different ranks")]
    ConflictingRank(String),
    #[error("invalid position `{0}`")]
    BadPosition(String),
}

/// A finite set of symbols, each with a rank.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct RankedAlphabet {
    symbols: BTreeMap<Symbol, usize>,
}

impl RankedAlphabet {
    pub fn new<S: AsRef<str>>(
        symbols: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, TermError> {
        let mut alphabet = RankedAlphabet::default();
        for (name, rank) in symbols {
            alphabet.insert(name.as_ref(), rank)?;
        }
        Ok(alphabet)
    }

    /// Adds a symbol; re-adding with the same rank is a no-op.
    pub fn insert(&mut self, name: &str, rank: usize) -> Result<(), TermError> {
        match self.symbols.get(name) {
            Some(r) if *r != rank => Err(TermError::ConflictingRank(name.to_string())),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(Arc::from(name), rank);
                Ok(())
            }
        }
    }

    pub fn rank(&self, name: &str) -> Option<usize> {
        self.symbols.get(name).copied()
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get_key_value(name).map(|(k, _)| k)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    /// Symbols with their ranks, sorted by name.
    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize)> {
        self.symbols.iter().map(|(s, r)| (s, *r))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(s, r)| format!("{s}/{r}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Node label: an alphabet symbol, or a leaf token (state or variable).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Sym(Symbol),
    State(Symbol),
    /// `x_i`, 1-based.
    Var(usize),
}

impl Label {
    pub fn sym(name: &str) -> Label {
        Label::Sym(Arc::from(name))
    }

    pub fn state(name: &str) -> Label {
        Label::State(Arc::from(name))
    }

    pub fn is_state(&self) -> bool {
        matches!(self, Label::State(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Sym(s) | Label::State(s) => f.write_str(s),
            Label::Var(i) => write!(f, "x{i}"),
        }
    }
}

/// A path from the root: 1-based child indices, `ε` being empty.
///
/// The derived order is the prefix-first lexicographic order: a proper
/// prefix precedes its extensions, otherwise the first differing index
/// decides.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Position {
    type Err = TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s == "ε" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i),
                _ => Err(TermError::BadPosition(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The ≤lex-least position of a nonempty set.
pub fn lex_min_position<'a>(
    positions: impl IntoIterator<Item = &'a Position>,
) -> Result<Position, TermError> {
    positions.into_iter().min().cloned().ok_or(TermError::EmptyPositionSet)
}

/// An immutable finite tree. Children are shared, so cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    label: Label,
    children: Arc<[Tree]>,
}

impl Tree {
    pub fn new(label: Label, children: Vec<Tree>) -> Tree {
        Tree { label, children: children.into() }
    }

    pub fn leaf(label: Label) -> Tree {
        Tree::new(label, Vec::new())
    }

    /// Shorthand for a symbol-labelled node.
    pub fn node(name: &str, children: Vec<Tree>) -> Tree {
        Tree::new(Label::sym(name), children)
    }

    pub fn state(name: &str) -> Tree {
        Tree::leaf(Label::state(name))
    }

    pub fn var(i: usize) -> Tree {
        Tree::leaf(Label::Var(i))
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// All positions in ≤lex order (preorder).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, _| out.push(Position(p.to_vec())));
        out
    }

    /// Positions whose label satisfies `pred`, in ≤lex order.
    pub fn positions_where(&self, mut pred: impl FnMut(&Label) -> bool) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, t| {
            if pred(&t.label) {
                out.push(Position(p.to_vec()))
            }
        });
        out
    }

    pub fn positions_of(&self, label: &Label) -> Vec<Position> {
        self.positions_where(|l| l == label)
    }

    /// Positions labelled by states.
    pub fn state_positions(&self) -> Vec<Position> {
        self.positions_where(Label::is_state)
    }

    fn walk(&self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &Tree)) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i + 1);
            c.walk(path, f);
            path.pop();
        }
    }

    pub fn subtree_at(&self, p: &Position) -> Option<&Tree> {
        let mut t = self;
        for &i in p.path() {
            t = t.children.get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    pub fn label_at(&self, p: &Position) -> Option<&Label> {
        self.subtree_at(p).map(Tree::label)
    }

    /// `t[t']_p`.
    pub fn replace_at(&self, p: &Position, replacement: Tree) -> Result<Tree, TermError> {
        fn go(t: &Tree, path: &[usize], r: Tree) -> Option<Tree> {
            let Some((&i, rest)) = path.split_first() else {
                return Some(r);
            };
            let child = t.children.get(i.checked_sub(1)?)?;
            let new_child = go(child, rest, r)?;
            let mut children = t.children.to_vec();
            children[i - 1] = new_child;
            Some(Tree::new(t.label.clone(), children))
        }
        go(self, p.path(), replacement).ok_or_else(|| TermError::InvalidPosition {
            position: p.clone(),
            tree: self.to_string(),
        })
    }

    /// Replaces every leaf for which `f` yields a tree, simultaneously.
    pub fn substitute(&self, f: &impl Fn(&Label) -> Option<Tree>) -> Tree {
        if self.children.is_empty() {
            if let Some(t) = f(&self.label) {
                return t;
            }
            return self.clone();
        }
        Tree::new(
            self.label.clone(),
            self.children.iter().map(|c| c.substitute(f)).collect(),
        )
    }

    /// `tθ` for a variable substitution; unmapped variables pass through.
    pub fn substitute_vars(&self, theta: &HashMap<usize, Tree>) -> Tree {
        self.substitute(&|l| match l {
            Label::Var(i) => theta.get(i).cloned(),
            _ => None,
        })
    }

    /// `t[x1 ← args[0], …, xk ← args[k-1]]`.
    pub fn instantiate(&self, args: &[Tree]) -> Tree {
        self.substitute(&|l| match l {
            Label::Var(i) if *i >= 1 => args.get(i - 1).cloned(),
            _ => None,
        })
    }

    /// Variable indices occurring in the tree.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.walk(&mut Vec::new(), &mut |_, t| {
            if let Label::Var(i) = t.label {
                out.insert(i);
            }
        });
        out
    }

    /// True when the tree contains neither states nor variables.
    pub fn is_ground(&self) -> bool {
        matches!(self.label, Label::Sym(_)) && self.children.iter().all(Tree::is_ground)
    }

    /// Sort key for the enumeration order used throughout the crate:
    /// height, then size, then term text.
    pub fn order_key(&self) -> (usize, usize, String) {
        (self.height(), self.size(), self.to_string())
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
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

impl Serialize for Tree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Sorts trees by (height, size, term text) and removes duplicates.
pub fn sort_trees(trees: &mut Vec<Tree>) {
    trees.sort_by_cached_key(Tree::order_key);
    trees.dedup();
}

/// Which leaf names, besides alphabet symbols, a parsed term may use.
#[derive(Debug, Clone, Copy)]
pub struct LeafScope<'a> {
    pub states: Option<&'a BTreeSet<Symbol>>,
    pub variables: bool,
}

impl LeafScope<'_> {
    pub const GROUND: LeafScope<'static> = LeafScope { states: None, variables: false };
    pub const VARIABLES: LeafScope<'static> = LeafScope { states: None, variables: true };
}

fn parse_var_name(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses `tree := name | name '(' tree (',' tree)* ')'` without resolving
/// names: every node comes back as [`Label::Sym`].
pub fn parse_raw(text: &str) -> Result<Tree, TermError> {
    let mut p = Parser { chars: text.char_indices().collect(), pos: 0, len: text.len() };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(t)
}

/// Parses and resolves a term against an alphabet and a leaf scope.
pub fn parse_term(
    alphabet: &RankedAlphabet,
    scope: LeafScope<'_>,
    text: &str,
) -> Result<Tree, TermError> {
    resolve(&parse_raw(text)?, alphabet, scope)
}

/// Resolves names of a raw term: states first, then variables, then
/// alphabet symbols (arity-checked).
pub fn resolve(
    raw: &Tree,
    alphabet: &RankedAlphabet,
    scope: LeafScope<'_>,
) -> Result<Tree, TermError> {
    let name: &str = match raw.label() {
        Label::Sym(s) | Label::State(s) => s,
        Label::Var(_) => return Ok(raw.clone()),
    };
    if let Some(states) = scope.states {
        if let Some(s) = states.get(name) {
            if !raw.is_leaf() {
                return Err(TermError::LeafWithArguments(name.to_string()));
            }
            return Ok(Tree::leaf(Label::State(s.clone())));
        }
    }
    if scope.variables && !alphabet.contains(name) {
        if let Some(i) = parse_var_name(name) {
            if !raw.is_leaf() {
                return Err(TermError::LeafWithArguments(name.to_string()));
            }
            return Ok(Tree::var(i));
        }
    }
    let (sym, rank) = alphabet
        .symbol(name)
        .map(|s| (s.clone(), alphabet.rank(name).unwrap_or(0)))
        .ok_or_else(|| TermError::UnknownSymbol(name.to_string()))?;
    if rank != raw.children().len() {
        return Err(TermError::Arity {
            symbol: name.to_string(),
            expected: rank,
            found: raw.children().len(),
        });
    }
    let children = raw
        .children()
        .iter()
        .map(|c| resolve(c, alphabet, scope))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Tree::new(Label::Sym(sym), children))
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn column(&self) -> usize {
        self.chars.get(self.pos).map(|(i, _)| *i).unwrap_or(self.len) + 1
    }

    fn error(&self, message: &str) -> TermError {
        TermError::Syntax { column: self.column(), message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn name(&mut self) -> Result<String, TermError> {
        self.skip_ws();
        let mut out = String::new();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(_) => return Err(self.error("expected a name")),
            None => return Err(self.error("unexpected end of input")),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                out.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn tree(&mut self) -> Result<Tree, TermError> {
        let name = self.name()?;
        self.skip_ws();
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
                return Ok(Tree::node(&name, children));
            }
            loop {
                children.push(self.tree()?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        Ok(Tree::node(&name, children))
    }
}

/// All ground trees over `alphabet` of height at most `max_height`, in
/// (height, size, term text) order.
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_height: usize) -> Vec<Tree> {
    let mut all: Vec<Tree> = Vec::new();
    for h in 0..=max_height {
        let mut next: Vec<Tree> = alphabet
            .iter()
            .filter(|(_, r)| *r == 0)
            .map(|(s, _)| Tree::new(Label::Sym(s.clone()), Vec::new()))
            .collect();
        if h > 0 {
            for (s, rank) in alphabet.iter().filter(|(_, r)| *r > 0) {
                for args in tuples(&all, rank) {
                    next.push(Tree::new(Label::Sym(s.clone()), args));
                }
            }
        }
        all = next;
    }
    sort_trees(&mut all);
    all
}

/// Number of ground trees of height at most `max_height`, saturating.
pub fn count_trees(alphabet: &RankedAlphabet, max_height: usize) -> u128 {
    let mut total: u128 = 0;
    for h in 0..=max_height {
        let mut next: u128 = 0;
        for (_, rank) in alphabet.iter() {
            let term = if rank == 0 {
                1
            } else if h == 0 {
                0
            } else {
                (0..rank).fold(1u128, |acc, _| acc.saturating_mul(total))
            };
            next = next.saturating_add(term);
        }
        total = next;
    }
    total
}

/// Cartesian power `items^k` in lexicographic index order.
pub(crate) fn tuples<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * items.len());
        for prefix in &out {
            for it in items {
                let mut v = prefix.clone();
                v.push(it.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Cartesian product of per-slot choices.
pub(crate) fn product_of<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for slot in choices {
        let mut next = Vec::with_capacity(out.len() * slot.len());
        for prefix in &out {
            for it in slot {
                let mut v = prefix.clone();
                v.push(it.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}
