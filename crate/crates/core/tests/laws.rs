use proptest::prelude::*;
use wtah::semiring::Semiring;
use wtah::term::{parse_term, LeafScope, RankedAlphabet};
use wtah::{Tree, Weight};

fn weight(sr: Semiring) -> impl Strategy<Value = Weight> {
    let range = match sr {
        Semiring::Integer => -30i64..30,
        Semiring::Modular(k) => 0..k as i64,
        Semiring::Boolean => 0..2,
        _ => 0..30,
    };
    // Tropical and arctic zeros are not reachable through integers.
    (any::<bool>(), range).prop_map(move |(zero, n)| if zero { sr.zero() } else { sr.from_i64(n).unwrap() })
}

fn laws(a: &Weight, b: &Weight, c: &Weight) -> Result<(), TestCaseError> {
    let sr = a.semiring();
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &sr.zero(), a.clone());
    prop_assert_eq!(a * &sr.one(), a.clone());
    prop_assert!((a * &sr.zero()).is_zero());
    Ok(())
}

fn triple(sr: Semiring) -> impl Strategy<Value = (Weight, Weight, Weight)> {
    (weight(sr), weight(sr), weight(sr))
}

proptest! {
    #[test]
    fn natural_laws((a, b, c) in triple(Semiring::Natural)) { laws(&a, &b, &c)?; }

    #[test]
    fn integer_laws((a, b, c) in triple(Semiring::Integer)) { laws(&a, &b, &c)?; }

    #[test]
    fn tropical_laws((a, b, c) in triple(Semiring::Tropical)) { laws(&a, &b, &c)?; }

    #[test]
    fn arctic_laws((a, b, c) in triple(Semiring::Arctic)) { laws(&a, &b, &c)?; }

    #[test]
    fn powers_match_repeated_products(a in weight(Semiring::Modular(12)), n in 0usize..20) {
        let mut expected = Semiring::Modular(12).one();
        for _ in 0..n {
            expected = &expected * &a;
        }
        prop_assert_eq!(a.pow(n), expected);
    }
}

#[test]
fn finite_semiring_laws_hold_exhaustively() {
    for sr in [Semiring::Boolean, Semiring::Modular(2), Semiring::Modular(5), Semiring::Modular(6)] {
        let all = sr.elements().unwrap();
        for a in &all {
            for b in &all {
                for c in &all {
                    laws(a, b, c).unwrap();
                }
            }
        }
    }
}

#[test]
fn flags_match_brute_force_on_finite_semirings() {
    for sr in [Semiring::Boolean, Semiring::Modular(2), Semiring::Modular(4), Semiring::Modular(6), Semiring::Modular(7)] {
        let all = sr.elements().unwrap();
        let pairs = || all.iter().flat_map(|a| all.iter().map(move |b| (a, b)));
        let zsf = pairs().all(|(a, b)| !(a + b).is_zero() || (a.is_zero() && b.is_zero()));
        let zdf = pairs().all(|(a, b)| !(a * b).is_zero() || a.is_zero() || b.is_zero());
        assert_eq!(sr.is_zero_sum_free(), zsf, "{sr}");
        assert_eq!(sr.is_zero_divisor_free(), zdf, "{sr}");
    }
}

#[test]
fn index_and_period_match_the_power_sequence() {
    for k in 2..=12 {
        let sr = Semiring::Modular(k);
        for a in sr.elements().unwrap() {
            let (index, period) = a.power_index_period().unwrap();
            let powers: Vec<Weight> = (0..=2 * k as usize + 2).map(|n| a.pow(n)).collect();
            // Least index with a repeat, and the least repeat distance there.
            let first_repeat = (0..powers.len())
                .find_map(|i| (i + 1..powers.len()).find(|&j| powers[j] == powers[i]).map(|j| (i, j - i)))
                .unwrap();
            assert_eq!((index, period), first_repeat, "{a} in {sr}");
        }
    }
}

fn alphabet() -> RankedAlphabet {
    RankedAlphabet::new([("a", 0), ("b", 0), ("g", 1), ("k", 2)]).unwrap()
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![Just(Tree::node("a", vec![])), Just(Tree::node("b", vec![]))];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Tree::node("g", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Tree::node("k", vec![l, r])),
        ]
    })
}

proptest! {
    #[test]
    fn trees_print_and_parse_back(t in tree()) {
        let parsed = parse_term(&alphabet(), LeafScope::GROUND, &t.to_string()).unwrap();
        prop_assert_eq!(parsed, t);
    }

    #[test]
    fn replacing_a_subtree_by_itself_is_the_identity(t in tree(), pick in any::<prop::sample::Index>()) {
        let positions = t.positions();
        prop_assert_eq!(positions.len(), t.size());
        let p = &positions[pick.index(positions.len())];
        let sub = t.subtree_at(p).unwrap().clone();
        prop_assert_eq!(t.replace_at(p, sub.clone()).unwrap(), t.clone());
        let swapped = t.replace_at(p, Tree::node("a", vec![])).unwrap();
        prop_assert_eq!(swapped.replace_at(p, sub).unwrap(), t);
    }
}
