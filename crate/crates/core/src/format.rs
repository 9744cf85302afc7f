//! Text formats for automata and homomorphisms.
//!
//! Automaton files are line oriented, `#` starts a comment:
//!
//! ```text
//! semiring: natural
//! alphabet: a/0 g/1 k/2        # optional, inferred from the rules
//! states: q qf bot
//! sink: bot                    # optional
//! final: qf
//! rules:
//! a -> q @ 1
//! g(q) -> q @ 2
//! k(q, g(bot)) -> qf @ 1 | 1 = 2.1
//! ```
//!
//! The weight defaults to one when `@ w` is omitted. Homomorphism files have
//! optional `from:` and `to:` alphabet lines and one `name/arity -> term`
//! line per source symbol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, RawAutomaton, RawRule};
use crate::hom::{HomError, TreeHomomorphism};
use crate::semiring::Semiring;
use crate::term::{parse_raw, resolve, Label, LeafScope, Position, RankedAlphabet, Symbol, TermError, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: {source}")]
    Automaton { line: usize, source: AutomatonError },
    #[error("{0}")]
    Hom(#[from] HomError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, column, message: message.into() }
}

/// A non-comment line: 1-based number, 1-based column of the first
/// character of `text` in the original line, and the text.
struct Line<'a> {
    number: usize,
    column: usize,
    text: &'a str,
}

fn content_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            let column = body.len() - trimmed.len() + 1;
            let trimmed = trimmed.trim_end();
            (!trimmed.is_empty()).then_some(Line { number: i + 1, column, text: trimmed })
        })
        .collect()
}

/// Column of `part` (a subslice of `line.text`) in the original line.
fn column_of(line: &Line<'_>, part: &str) -> usize {
    line.column + (part.as_ptr() as usize - line.text.as_ptr() as usize)
}

fn term_error(line: &Line<'_>, part: &str, e: TermError) -> FormatError {
    let lead = part.len() - part.trim_start().len();
    match e {
        TermError::Syntax { column, message } => syntax(line.number, column_of(line, part) + column - 1, message),
        other => syntax(line.number, column_of(line, part) + lead, other.to_string()),
    }
}

fn header<'a>(line: &Line<'a>) -> Option<(&'a str, &'a str)> {
    let (key, value) = line.text.split_once(':')?;
    let key = key.trim();
    key.bytes().all(|b| b.is_ascii_alphabetic()).then_some((key, value))
}

/// Parses `a/0 g/1 k/2`.
fn parse_alphabet(line: &Line<'_>, value: &str) -> Result<RankedAlphabet, FormatError> {
    let mut alphabet = RankedAlphabet::default();
    for item in value.split_whitespace() {
        let col = column_of(line, item);
        let (name, rank) =
            item.split_once('/').ok_or_else(|| syntax(line.number, col, format!("expected `name/arity`, got `{item}`")))?;
        let rank: usize = rank.parse().map_err(|_| syntax(line.number, col, format!("bad arity in `{item}`")))?;
        alphabet.insert(name, rank).map_err(|e| syntax(line.number, col, e.to_string()))?;
    }
    Ok(alphabet)
}

/// Adds every symbol of `t` not in `exclude` to `alphabet`.
fn infer_symbols(
    t: &Tree,
    exclude: &dyn Fn(&str) -> bool,
    alphabet: &mut RankedAlphabet,
) -> Result<(), TermError> {
    if let Label::Sym(s) = t.label() {
        if !exclude(s) || !t.is_leaf() {
            alphabet.insert(s, t.children().len())?;
        }
    }
    t.children().iter().try_for_each(|c| infer_symbols(c, exclude, alphabet))
}

struct RuleLine<'a> {
    line: Line<'a>,
    lhs: &'a str,
    target: &'a str,
    weight: Option<&'a str>,
    constraint: Option<&'a str>,
}

fn split_rule(line: Line<'_>) -> Result<RuleLine<'_>, FormatError> {
    let text = line.text;
    let (lhs, rest) =
        text.split_once("->").ok_or_else(|| syntax(line.number, line.column, "expected `lhs -> state @ weight`"))?;
    let (head, constraint) = match rest.split_once('|') {
        Some((h, c)) => (h, Some(c)),
        None => (rest, None),
    };
    let (target, weight) = match head.split_once('@') {
        Some((t, w)) => (t, Some(w)),
        None => (head, None),
    };
    Ok(RuleLine { line, lhs, target, weight, constraint })
}

/// Parses an automaton file and validates the automaton.
pub fn parse_automaton(text: &str) -> Result<Automaton, FormatError> {
    let lines = content_lines(text);
    let mut semiring: Option<Semiring> = None;
    let mut alphabet: Option<RankedAlphabet> = None;
    let mut states: Vec<(Symbol, usize)> = Vec::new();
    let mut sink: Option<(Symbol, usize)> = None;
    let mut finals: Vec<(Symbol, usize)> = Vec::new();
    let mut rule_lines: Vec<RuleLine<'_>> = Vec::new();
    let mut in_rules = false;
    let mut last_line = 0;

    for line in lines {
        last_line = line.number;
        if in_rules {
            rule_lines.push(split_rule(line)?);
            continue;
        }
        let Some((key, value)) = header(&line) else {
            return Err(syntax(line.number, line.column, "expected a `key: value` header or `rules:`"));
        };
        let names = || value.split_whitespace().map(Arc::from).map(|s| (s, line.number));
        match key {
            "semiring" => {
                let s = value.trim().parse().map_err(|e: crate::semiring::SemiringError| {
                    syntax(line.number, column_of(&line, value.trim_start()), e.to_string())
                })?;
                semiring = Some(s);
            }
            "alphabet" => alphabet = Some(parse_alphabet(&line, value)?),
            "states" => states.extend(names()),
            "sink" => {
                let mut it = names();
                sink = it.next();
                if sink.is_none() || it.next().is_some() {
                    return Err(syntax(line.number, line.column, "`sink:` takes exactly one state"));
                }
            }
            "final" | "finals" => finals.extend(names()),
            "rules" => {
                if !value.trim().is_empty() {
                    return Err(syntax(line.number, column_of(&line, value), "`rules:` stands on its own line"));
                }
                in_rules = true;
            }
            other => return Err(syntax(line.number, line.column, format!("unknown header `{other}`"))),
        }
    }
    let semiring = semiring.ok_or_else(|| syntax(last_line.max(1), 1, "missing `semiring:` header"))?;
    if let Some((s, _)) = &sink {
        if !states.iter().any(|(q, _)| q == s) {
            states.push(sink.clone().expect("checked"));
        }
    }
    let state_set: BTreeSet<Symbol> = states.iter().map(|(s, _)| s.clone()).collect();

    let raws: Vec<Tree> = rule_lines
        .iter()
        .map(|r| parse_raw(r.lhs).map_err(|e| term_error(&r.line, r.lhs, e)))
        .collect::<Result<_, _>>()?;
    let alphabet = match alphabet {
        Some(a) => a,
        None => {
            let mut inferred = RankedAlphabet::default();
            for (r, raw) in rule_lines.iter().zip(&raws) {
                infer_symbols(raw, &|n| state_set.contains(n), &mut inferred)
                    .map_err(|e| term_error(&r.line, r.lhs, e))?;
            }
            inferred
        }
    };

    let scope = LeafScope { states: Some(&state_set), variables: false };
    let mut rules = Vec::with_capacity(rule_lines.len());
    for (r, raw) in rule_lines.iter().zip(&raws) {
        let n = r.line.number;
        let lhs = resolve(raw, &alphabet, scope).map_err(|e| term_error(&r.line, r.lhs, e))?;
        let target = r.target.trim();
        if target.is_empty() || target.split_whitespace().count() != 1 {
            return Err(syntax(n, column_of(&r.line, r.target), "expected a single target state"));
        }
        let target_col = column_of(&r.line, r.target.trim_start());
        if !state_set.contains(target) {
            return Err(syntax(n, target_col, format!("undeclared state `{target}`")));
        }
        let weight = match r.weight {
            Some(w) => semiring
                .parse_rule_weight(w)
                .map_err(|e| syntax(n, column_of(&r.line, w.trim_start()), e.to_string()))?,
            None => semiring.one(),
        };
        let mut pairs = Vec::new();
        if let Some(c) = r.constraint {
            for pair in c.split(',') {
                let col = column_of(&r.line, pair.trim_start());
                let (a, b) = pair.split_once('=').ok_or_else(|| syntax(n, col, "expected `p = p`"))?;
                let pa: Position = a.trim().parse().map_err(|e: TermError| syntax(n, col, e.to_string()))?;
                let pb: Position = b.trim().parse().map_err(|e: TermError| syntax(n, col, e.to_string()))?;
                pairs.push((pa, pb));
            }
        }
        rules.push(RawRule::new(lhs, pairs, target, weight));
    }

    let raw = RawAutomaton {
        semiring,
        alphabet,
        states: states.iter().map(|(s, _)| s.clone()).collect(),
        sink: sink.as_ref().map(|(s, _)| s.clone()),
        finals: finals.iter().map(|(s, _)| s.clone()).collect(),
        rules,
    };
    Automaton::new(raw).map_err(|e| {
        let line = match &e {
            AutomatonError::BareStateLhs { rule }
            | AutomatonError::VariableInLhs { rule }
            | AutomatonError::ConstraintPosition { rule, .. }
            | AutomatonError::ZeroWeight { rule }
            | AutomatonError::SemiringMismatch { rule, .. }
            | AutomatonError::DuplicateRule { rule, .. } => rule_lines[*rule].line.number,
            AutomatonError::UndeclaredState(s)
            | AutomatonError::DuplicateState(s)
            | AutomatonError::StateIsSymbol(s)
            | AutomatonError::FinalSink(s) => states
                .iter()
                .chain(&finals)
                .chain(sink.iter())
                .find(|(q, _)| &**q == s.as_str())
                .map(|(_, l)| *l)
                .unwrap_or(0),
            _ => 0,
        };
        FormatError::Automaton { line, source: e }
    })
}

/// The canonical text of an automaton: states sorted by name, rules sorted
/// by (lhs, target, constraint).
pub fn emit_automaton(a: &Automaton) -> String {
    let form = a.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "semiring: {}", form.semiring);
    let alphabet: Vec<String> = form.alphabet.iter().map(|(s, r)| format!("{s}/{r}")).collect();
    let _ = writeln!(out, "alphabet: {}", alphabet.join(" "));
    let _ = writeln!(out, "states: {}", form.states.join(" "));
    if let Some(s) = &form.sink {
        let _ = writeln!(out, "sink: {s}");
    }
    let _ = writeln!(out, "final: {}", form.finals.join(" "));
    out.push_str("rules:\n");
    for (lhs, target, constraint, weight) in &form.rules {
        let _ = write!(out, "{lhs} -> {target} @ {weight}");
        if !constraint.is_empty() {
            let _ = write!(out, " | {constraint}");
        }
        out.push('\n');
    }
    out
}

/// Parses a homomorphism file.
pub fn parse_hom(text: &str) -> Result<TreeHomomorphism, FormatError> {
    let mut from: Option<RankedAlphabet> = None;
    let mut to: Option<RankedAlphabet> = None;
    let mut images: Vec<(Line<'_>, &str, usize, &str)> = Vec::new();
    for line in content_lines(text) {
        if let Some((key, value)) = header(&line) {
            match key {
                "from" => from = Some(parse_alphabet(&line, value)?),
                "to" => to = Some(parse_alphabet(&line, value)?),
                other => return Err(syntax(line.number, line.column, format!("unknown header `{other}`"))),
            }
            continue;
        }
        let (head, term) = line
            .text
            .split_once("->")
            .ok_or_else(|| syntax(line.number, line.column, "expected `name/arity -> term`"))?;
        let (name, rank) = head
            .trim()
            .split_once('/')
            .ok_or_else(|| syntax(line.number, line.column, "expected `name/arity` before `->`"))?;
        let rank: usize =
            rank.trim().parse().map_err(|_| syntax(line.number, line.column, format!("bad arity `{rank}`")))?;
        images.push((line, name.trim(), rank, term));
    }

    let source = match from {
        Some(a) => a,
        None => {
            let mut a = RankedAlphabet::default();
            for (line, name, rank, _) in &images {
                a.insert(name, *rank).map_err(|e| syntax(line.number, line.column, e.to_string()))?;
            }
            a
        }
    };
    let raws: Vec<Tree> = images
        .iter()
        .map(|(line, _, _, term)| parse_raw(term).map_err(|e| term_error(line, term, e)))
        .collect::<Result<_, _>>()?;
    let target = match to {
        Some(a) => a,
        None => {
            let mut a = RankedAlphabet::default();
            let is_var = |n: &str| {
                n.strip_prefix('x').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            };
            for ((line, _, _, term), raw) in images.iter().zip(&raws) {
                infer_symbols(raw, &is_var, &mut a).map_err(|e| term_error(line, term, e))?;
            }
            a
        }
    };
    let mut resolved: BTreeMap<Symbol, Tree> = BTreeMap::new();
    for ((line, name, rank, term), raw) in images.iter().zip(&raws) {
        if source.rank(name) != Some(*rank) {
            return Err(syntax(
                line.number,
                line.column,
                format!("`{name}/{rank}` is not in the source alphabet"),
            ));
        }
        let t = resolve(raw, &target, LeafScope::VARIABLES).map_err(|e| term_error(line, term, e))?;
        if resolved.insert(Arc::from(*name), t).is_some() {
            return Err(syntax(line.number, line.column, format!("second image for `{name}`")));
        }
    }
    Ok(TreeHomomorphism::new(source, target, resolved)?)
}

/// The canonical text of a homomorphism.
pub fn emit_hom(h: &TreeHomomorphism) -> String {
    let list = |a: &RankedAlphabet| a.iter().map(|(s, r)| format!("{s}/{r}")).collect::<Vec<_>>().join(" ");
    let mut out = format!("from: {}\nto: {}\n", list(h.source()), list(h.target()));
    for (s, image) in h.images() {
        let _ = writeln!(out, "{s}/{} -> {image}", h.source().rank(s).unwrap_or(0));
    }
    out
}
