mod common;

use common::random::random_instance;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wtah::automaton::AutomatonError;
use wtah::format::FormatError;
use wtah::hom::HomError;
use wtah::{emit_automaton, emit_hom, parse_automaton, parse_hom, Semiring};

const AUTOMATA: [&str; 10] = [
    "pair_constrained.wta",
    "pair_eq_restricted.wta",
    "f_powers.wta",
    "pair_support.wta",
    "pair_lin2.wta",
    "arctic_two_chains.wta",
    "arctic_two_chains_image.wta",
    "letter_count.wta",
    "letter_count_image.wta",
    "z6_zero_run.wta",
];

const HOMS: [&str; 4] = ["f_duplicate.hom", "collapse_tetris_free.hom", "collapse_tetris_violating.hom", "f_identity.hom"];

fn golden(name: &str) -> String {
    read(&format!("golden/{name}"))
}

#[test]
fn automaton_emission_matches_goldens() {
    for name in AUTOMATA {
        let emitted = emit_automaton(&automaton(name));
        assert_eq!(emitted, golden(name), "{name}");
        let reparsed = parse_automaton(&emitted).unwrap();
        assert_eq!(emit_automaton(&reparsed), emitted, "{name}");
        assert_eq!(reparsed.canonical(), automaton(name).canonical());
    }
}

#[test]
fn hom_emission_matches_goldens() {
    for name in HOMS {
        let emitted = emit_hom(&hom(name));
        assert_eq!(emitted, golden(name), "{name}");
        assert_eq!(parse_hom(&emitted).unwrap(), hom(name));
    }
}

#[test]
fn random_instances_survive_emission() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..12 {
        let sr = [Semiring::Natural, Semiring::Tropical, Semiring::Modular(6), Semiring::Boolean][i % 4];
        let inst = random_instance(&mut rng, sr, i % 2 == 0);
        let text = emit_automaton(&inst.a);
        assert_eq!(parse_automaton(&text).unwrap().canonical(), inst.a.canonical(), "{}", inst.automaton_text);
        assert_eq!(parse_hom(&emit_hom(&inst.h)).unwrap(), inst.h, "{}", inst.hom_text);
    }
}

fn automaton_error(text: &str) -> FormatError {
    parse_automaton(text).expect_err(text)
}

#[test]
fn constraint_off_a_state_position_is_reported_with_its_line() {
    let text = "semiring: natural\nstates: q qf\nsink: bot\nfinal: qf\nrules:\na -> q @ 1\nk(q, g(bot)) -> qf @ 1 | 1 = 2\n";
    match automaton_error(text) {
        FormatError::Automaton { line, source: AutomatonError::ConstraintPosition { position, .. } } => {
            assert_eq!(line, 7);
            assert_eq!(position.to_string(), "2");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn zero_weight_rules_are_rejected() {
    let text = "semiring: natural\nstates: q\nfinal: q\nrules:\na -> q @ 0\n";
    for text in [text.to_string(), text.replace("natural", "tropical").replace("@ 0", "@ inf")] {
        match automaton_error(&text) {
            FormatError::Syntax { line, message, .. } => {
                assert_eq!(line, 5);
                assert!(message.contains("zero"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn syntax_errors_carry_positions() {
    match automaton_error("semiring: natural\nstates: q\nfinal: q\nrules:\n  a => q\n") {
        FormatError::Syntax { line, column, .. } => {
            assert_eq!(line, 5);
            assert!(column >= 3, "{column}");
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(automaton_error("semiring: reals\nstates: q\n"), FormatError::Syntax { line: 1, .. }));
    assert!(matches!(
        automaton_error("semiring: natural\nstates: q\nfinal: p\nrules:\na -> q\n"),
        FormatError::Automaton { source: AutomatonError::UndeclaredState(_), .. } | FormatError::Syntax { .. }
    ));
}

#[test]
fn erasing_and_deleting_homomorphisms_are_rejected() {
    let erasing = "from: a/0 g/1\nto: a/0\na/0 -> a\ng/1 -> x1\n";
    assert!(matches!(parse_hom(erasing), Err(FormatError::Hom(HomError::Erasing(_)))));
    let deleting = "from: a/0 f/2\nto: a/0 g/1\na/0 -> a\nf/2 -> g(x1)\n";
    assert!(matches!(
        parse_hom(deleting),
        Err(FormatError::Hom(HomError::Deleting { missing: 2, .. }))
    ));
    let missing = "from: a/0 g/1\nto: a/0 g/1\na/0 -> a\n";
    assert!(matches!(parse_hom(missing), Err(FormatError::Hom(HomError::MissingSymbol(_)))));
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = format!("# header\n\n{}\n# trailing\n", read("f_powers.wta").replace("rules:", "rules: # below"));
    assert_eq!(parse_automaton(&text).unwrap().canonical(), automaton("f_powers.wta").canonical());
}

fn weight_strategy() -> impl Strategy<Value = (Semiring, i64)> {
    prop_oneof![
        (1i64..50).prop_map(|w| (Semiring::Natural, w)),
        (-20i64..20).prop_filter("nonzero", |w| *w != 0).prop_map(|w| (Semiring::Integer, w)),
        (0i64..40).prop_map(|w| (Semiring::Tropical, w)),
        (0i64..40).prop_map(|w| (Semiring::Arctic, w)),
        (1i64..6).prop_map(|w| (Semiring::Modular(6), w)),
    ]
}

proptest! {
    #[test]
    fn single_rule_automata_round_trip((sr, w) in weight_strategy(), depth in 0usize..4) {
        let lhs = (0..depth).fold("a".to_string(), |acc, _| format!("g({acc})"));
        let text = format!("semiring: {sr}\nstates: q\nfinal: q\nrules:\n{lhs} -> q @ {w}\n");
        let a = parse_automaton(&text).unwrap();
        let emitted = emit_automaton(&a);
        prop_assert_eq!(emit_automaton(&parse_automaton(&emitted).unwrap()), emitted.clone());
        let expected_weight = sr.from_i64(w).unwrap().to_string();
        prop_assert!(emitted.ends_with(&format!("{} -> q @ {expected_weight}\n", lhs)), "{}", emitted);
    }
}

/// Prefixes every state name with `z_` and reverses the rule lines.
fn scramble(text: &str, a: &wtah::Automaton) -> String {
    let rename = |line: &str| -> String {
        let mut out = String::new();
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String| {
            if a.state(word).is_some() {
                out.push_str("z_");
            }
            out.push_str(word);
            word.clear();
        };
        for c in line.chars() {
            if c.is_alphanumeric() || c == '_' {
                word.push(c);
            } else {
                flush(&mut word, &mut out);
                out.push(c);
            }
        }
        flush(&mut word, &mut out);
        out
    };
    let (head, rules) = text.split_once("rules:\n").unwrap();
    let mut lines: Vec<String> = rules.lines().map(rename).collect();
    lines.reverse();
    let head: Vec<String> = head
        .lines()
        .map(|l| match l.split_once(':') {
            Some((k, v)) if ["states", "sink", "final"].contains(&k) => format!("{k}:{}", rename(v)),
            _ => l.to_string(),
        })
        .collect();
    format!("{}\nrules:\n{}\n", head.join("\n"), lines.join("\n"))
}

#[test]
fn first_use_renaming_ignores_state_names_and_rule_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut cases: Vec<wtah::Automaton> = AUTOMATA.iter().map(|n| automaton(n)).collect();
    for i in 0..10 {
        cases.push(random_instance(&mut rng, [Semiring::Natural, Semiring::Tropical][i % 2], false).a);
    }
    for a in cases {
        let text = emit_automaton(&a);
        let scrambled = parse_automaton(&scramble(&text, &a)).unwrap_or_else(|e| panic!("{e}\n{}", scramble(&text, &a)));
        assert!(scrambled.states().iter().all(|q| q.starts_with("z_")));
        assert!(a.isomorphic_to(&scrambled), "{text}\n{}", emit_automaton(&scrambled));
    }
}
