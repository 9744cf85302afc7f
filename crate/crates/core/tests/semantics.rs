mod common;

use common::*;
use wtah::automaton::{
    check_unambiguous, evaluate, runs_to_state, state_language_up_to, support_up_to, EqRestriction, Evaluator,
    RunEnumerator,
};
use wtah::semiring::Semiring;
use wtah::term::{enumerate_trees, Tree};
use wtah::Witness;

fn n(a: &wtah::Automaton, v: i64) -> wtah::Weight {
    a.semiring().from_i64(v).unwrap()
}

#[test]
fn constrained_pair_weights_differ_between_plain_and_sink_versions() {
    let a = automaton("pair_constrained.wta");
    let b = automaton("pair_eq_restricted.wta");
    let t = tree(&a, "k(g(g(a)), g(g(g(a))))");
    let ra = runs_to_state(&a, &t, "qf").unwrap();
    let rb = runs_to_state(&b, &t, "qf").unwrap();
    assert_eq!(ra.len(), 1);
    assert_eq!(rb.len(), 1);
    assert_eq!(ra[0].weight(), &n(&a, 16));
    assert_eq!(rb[0].weight(), &n(&b, 4));
    assert_eq!(evaluate(&a, &t), n(&a, 16));
    assert_eq!(evaluate(&b, &t), n(&b, 4));
}

#[test]
fn violated_constraint_blocks_the_run() {
    let a = automaton("pair_constrained.wta");
    let t = tree(&a, "k(g(a), g(a))");
    assert!(runs_to_state(&a, &t, "qf").unwrap().is_empty());
    assert!(evaluate(&a, &t).is_zero());
}

#[test]
fn classification() {
    let a = automaton("pair_constrained.wta");
    assert_eq!(a.kind(), wtah::Kind::Wtah);
    assert!(matches!(a.is_eq_restricted(), EqRestriction::No(_)));
    let b = automaton("pair_eq_restricted.wta");
    assert!(b.is_eq_restricted().holds());
    let c = automaton("f_powers.wta");
    assert!(c.is_wta() && c.is_wtg());
    assert!(matches!(c.is_eq_restricted(), EqRestriction::No(_)));
}

#[test]
fn series_examples() {
    let a = automaton("f_powers.wta");
    assert_eq!(evaluate(&a, &tree(&a, "f(g(g(g(a))))")), n(&a, 8));
    let hat = automaton("letter_count.wta");
    assert_eq!(evaluate(&hat, &tree(&hat, "g(b)")), n(&hat, 3));
    let arctic = automaton("arctic_two_chains.wta");
    assert_eq!(evaluate(&arctic, &tree(&arctic, "g(g(b))")), n(&arctic, 4));
}

#[test]
fn supports_and_state_languages() {
    let b = automaton("pair_eq_restricted.wta");
    let support: Vec<(String, String)> =
        support_up_to(&b, 4).into_iter().map(|(t, w)| (t.to_string(), w.to_string())).collect();
    assert_eq!(
        support,
        [("k(a,g(a))", "1"), ("k(g(a),g(g(a)))", "2"), ("k(g(g(a)),g(g(g(a))))", "4")]
            .map(|(t, w)| (t.to_string(), w.to_string()))
    );
    let hat = automaton("letter_count.wta");
    let support: Vec<String> = support_up_to(&hat, 0).into_iter().map(|(t, w)| format!("{t}:{w}")).collect();
    assert_eq!(support, ["a:2", "b:3"]);

    let lang = |q: &str, bound| -> Vec<String> {
        state_language_up_to(&b, q, bound).unwrap().into_iter().map(|(t, w)| format!("{t}:{w}")).collect()
    };
    assert_eq!(lang("q", 2), ["a:1", "g(a):2", "g(g(a)):4"]);
    assert_eq!(lang("bot", 1), ["a:1", "g(a):1", "k(a,a):1"]);
    assert!(lang("qf", 1).is_empty());
}

#[test]
fn no_finals_means_empty_support() {
    let text = common::read("f_powers.wta").replace("final: qf", "final:");
    let a = wtah::parse_automaton(&text).unwrap();
    assert!(support_up_to(&a, 4).is_empty());
}

#[test]
fn unambiguity_examples() {
    let image = automaton("arctic_two_chains_image.wta");
    let v = check_unambiguous(&image, 1);
    match v.witness_ref() {
        Some(Witness::Ambiguous { tree, runs }) => {
            assert_eq!(tree.to_string(), "c");
            assert_eq!(runs.len(), 2);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(check_unambiguous(&automaton("pair_eq_restricted.wta"), 5).is_ok());
    assert!(check_unambiguous(&automaton("pair_constrained.wta"), 5).is_ok());
}

/// Every automaton in the data directory over its own alphabet.
fn all_automata() -> Vec<wtah::Automaton> {
    [
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
    ]
    .iter()
    .map(|n| automaton(n))
    .collect()
}

#[test]
fn memoized_and_naive_runs_agree() {
    for a in all_automata() {
        let mut runs = RunEnumerator::new(&a);
        let mut eval = Evaluator::new(&a);
        for t in enumerate_trees(a.alphabet(), 3) {
            let mut total = a.semiring().zero();
            for (qi, q) in a.states().iter().enumerate() {
                let mut mine: Vec<(String, String)> =
                    runs.runs(&t, qi).iter().map(|r| (r.to_string(), r.weight().to_string())).collect();
                let mut naive: Vec<(String, String)> =
                    naive_runs(&a, &t, q).into_iter().map(|(r, w)| (r, w.to_string())).collect();
                mine.sort();
                naive.sort();
                assert_eq!(mine, naive, "{t} to {q}");
                for r in runs.runs(&t, qi).iter() {
                    assert!(r.is_valid(&a), "{r} on {t}");
                }
                if a.is_final(q) {
                    total = &total + &eval.weight_at(&t, q);
                }
            }
            assert_eq!(eval.evaluate(&t), naive_eval(&a, &t), "{t}");
            assert_eq!(total, eval.evaluate(&t));
        }
    }
}

#[test]
fn domain_enumeration_finds_the_whole_support() {
    for a in all_automata() {
        let bound = if a.alphabet().max_rank() >= 2 { 3 } else { 5 };
        assert_eq!(support_up_to(&a, bound), naive_support(&a, bound));
        let visited = wtah::automaton::TreeDomain::new(&a).trees_to_finals(bound).len() as u128;
        assert!(wtah::automaton::domain_size_bound(&a, bound) >= visited);
    }
}

/// For a WTA, runs on `t` correspond to state labelings of its positions
/// consistent with the rules.
#[test]
fn wta_runs_count_consistent_labelings() {
    fn labelings(a: &wtah::Automaton, t: &Tree, q: &str) -> usize {
        let wtah::term::Label::Sym(sym) = t.label() else { unreachable!() };
        a.rules()
            .iter()
            .filter(|r| &**r.target() == q && r.lhs().label() == t.label() && r.lhs().children().len() == t.children().len())
            .filter(|r| matches!(r.lhs().label(), wtah::term::Label::Sym(s) if s == sym))
            .map(|r| {
                r.states().zip(t.children()).map(|(qi, c)| labelings(a, c, qi)).product::<usize>()
            })
            .sum()
    }
    for name in ["f_powers.wta", "arctic_two_chains.wta", "letter_count.wta"] {
        let a = automaton(name);
        assert!(a.is_wta());
        let mut runs = RunEnumerator::new(&a);
        for t in enumerate_trees(a.alphabet(), 3) {
            for (qi, q) in a.states().iter().enumerate() {
                assert_eq!(runs.runs(&t, qi).len(), labelings(&a, &t, q));
            }
        }
    }
}

#[test]
fn run_targets_follow_state_positions() {
    let b = automaton("pair_eq_restricted.wta");
    let t = tree(&b, "k(g(a), g(g(a)))");
    let run = &runs_to_state(&b, &t, "qf").unwrap()[0];
    let targets: Vec<String> =
        run.targets_by_position(&b).into_iter().map(|(p, q)| format!("{p}:{q}")).collect();
    assert_eq!(targets, ["e:qf", "1:q", "1.1:q", "2.1:bot", "2.1.1:bot"]);
}

#[test]
fn semirings_of_data_files() {
    assert_eq!(automaton("z6_zero_run.wta").semiring(), Semiring::Modular(6));
    assert_eq!(automaton("arctic_two_chains.wta").semiring(), Semiring::Arctic);
}
