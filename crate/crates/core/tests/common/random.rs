//! Seeded random WTA/homomorphism pairs over small alphabets.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wtah::{parse_automaton, parse_hom, Automaton, Semiring, TreeHomomorphism};

pub struct Instance {
    pub a: Automaton,
    pub h: TreeHomomorphism,
    pub automaton_text: String,
    pub hom_text: String,
}

/// Source alphabets whose trees of height ≤ 4 stay enumerable.
const SOURCES: [&[(&str, usize)]; 3] = [
    &[("a", 0), ("b", 0), ("g", 1), ("e", 1)],
    &[("a", 0), ("g", 1), ("f", 2)],
    &[("a", 0), ("b", 0), ("g", 1)],
];

const TARGET: &[(&str, usize)] = &[("c", 0), ("u", 1), ("k", 2)];

fn random_image(rng: &mut ChaCha8Rng, rank: usize) -> String {
    fn go(rng: &mut ChaCha8Rng, rank: usize, depth: usize, root: bool) -> String {
        let var_leaf = rank > 0 && !root && rng.gen_bool(0.7);
        if var_leaf {
            return format!("x{}", rng.gen_range(1..=rank));
        }
        let choices: Vec<&(&str, usize)> =
            TARGET.iter().filter(|(_, r)| depth > 0 || *r == 0).collect();
        let (sym, r) = **choices.choose(rng).unwrap();
        if r == 0 {
            return sym.to_string();
        }
        let args: Vec<String> = (0..r).map(|_| go(rng, rank, depth - 1, false)).collect();
        format!("{sym}({})", args.join(", "))
    }
    loop {
        let t = go(rng, rank, 2, true);
        if (1..=rank).all(|i| {
            let v = format!("x{i}");
            t.split(|c: char| !c.is_alphanumeric()).any(|tok| tok == v)
        }) {
            return t;
        }
    }
}

fn random_weight(rng: &mut ChaCha8Rng, semiring: Semiring) -> String {
    match semiring {
        Semiring::Natural => rng.gen_range(1..=3).to_string(),
        Semiring::Tropical => rng.gen_range(0..=3).to_string(),
        Semiring::Modular(k) => rng.gen_range(1..k).to_string(),
        other => other.one().to_string(),
    }
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |q| {
                    let mut v = p.clone();
                    v.push(q);
                    v
                })
            })
            .collect();
    }
    out
}

/// A random WTA over one of the small source alphabets and a random
/// nondeleting, nonerasing homomorphism into `{c/0, u/1, k/2}`. With
/// `deterministic`, every left-hand side gets at most one rule.
pub fn random_instance(rng: &mut ChaCha8Rng, semiring: Semiring, deterministic: bool) -> Instance {
    let source = *SOURCES.choose(rng).unwrap();
    let n = rng.gen_range(1..=3);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut rules = Vec::new();
    for &(sym, rank) in source {
        for tuple in tuples(n, rank) {
            let lhs = if rank == 0 {
                sym.to_string()
            } else {
                let args: Vec<&str> = tuple.iter().map(|&i| states[i].as_str()).collect();
                format!("{sym}({})", args.join(", "))
            };
            let targets: Vec<usize> = if deterministic {
                if rng.gen_bool(0.8) { vec![rng.gen_range(0..n)] } else { vec![] }
            } else {
                (0..n).filter(|_| rng.gen_bool(0.45)).collect()
            };
            for q in targets {
                rules.push(format!("{lhs} -> {} @ {}", states[q], random_weight(rng, semiring)));
            }
        }
    }
    let mut finals: Vec<&str> = states.iter().filter(|_| rng.gen_bool(0.5)).map(String::as_str).collect();
    if finals.is_empty() {
        finals.push(&states[0]);
    }
    let alphabet: Vec<String> = source.iter().map(|(s, r)| format!("{s}/{r}")).collect();
    let automaton_text = format!(
        "semiring: {}\nalphabet: {}\nstates: {}\nfinal: {}\nrules:\n{}\n",
        semiring,
        alphabet.join(" "),
        states.join(" "),
        finals.join(" "),
        rules.join("\n")
    );
    let target: Vec<String> = TARGET.iter().map(|(s, r)| format!("{s}/{r}")).collect();
    let mut hom_text = format!("from: {}\nto: {}\n", alphabet.join(" "), target.join(" "));
    for &(sym, rank) in source {
        hom_text.push_str(&format!("{sym}/{rank} -> {}\n", random_image(rng, rank)));
    }
    let a = parse_automaton(&automaton_text).unwrap_or_else(|e| panic!("{e}\n{automaton_text}"));
    let h = parse_hom(&hom_text).unwrap_or_else(|e| panic!("{e}\n{hom_text}"));
    Instance { a, h, automaton_text, hom_text }
}
