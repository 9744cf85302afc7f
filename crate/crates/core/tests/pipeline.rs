mod common;

use common::*;
use wtah::decide::{reduce_to_support, SupportBasis};
use wtah::report::{emit_report, Format};
use wtah::{decide_hom_regularity, DecisionOptions, RegularityVerdict, Semiring, Witness};

fn opts(lin_height: usize, eq_bound: usize) -> DecisionOptions {
    DecisionOptions { lin_height, eq_bound, ..DecisionOptions::default() }
}

#[test]
fn duplicating_homomorphism_fails_the_linearization_surrogate() {
    let report = decide_hom_regularity(&automaton("f_powers.wta"), &hom("f_duplicate.hom"), &opts(2, 5)).unwrap();
    assert!(report.tetris_free.as_ref().unwrap().is_ok());
    assert!(report.h_unambiguous.as_ref().unwrap().is_ok());
    assert!(report.image_unambiguous.as_ref().unwrap().is_ok());
    assert_eq!(report.support_basis, Some(SupportBasis::ZeroSumFree));
    match &report.verdict {
        RegularityVerdict::LinearizationMismatch { witness, image_value, lin_value, .. } => {
            assert_eq!(witness.to_string(), "k(g(g(g(a))),g(g(g(g(a)))))");
            assert_eq!((image_value.to_string(), lin_value.to_string()), ("8".into(), "0".into()));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(report.verdict.name(), "LINEARIZATION_MISMATCH");
}

#[test]
fn h_ambiguity_stops_the_pipeline() {
    let report =
        decide_hom_regularity(&automaton("arctic_two_chains.wta"), &hom("collapse_tetris_free.hom"), &opts(2, 5))
            .unwrap();
    match &report.verdict {
        RegularityVerdict::PreconditionViolated { check, witness: Witness::HAmbiguous { left, right, .. } } => {
            assert_eq!(check, "h-unambiguous");
            assert_eq!((left.to_string(), right.to_string()), ("a".into(), "b".into()));
        }
        other => panic!("{other:?}"),
    }
    assert!(report.image.is_none());
}

#[test]
fn tetris_violation_stops_the_pipeline() {
    let report =
        decide_hom_regularity(&automaton("letter_count.wta"), &hom("collapse_tetris_violating.hom"), &opts(2, 5))
            .unwrap();
    match &report.verdict {
        RegularityVerdict::PreconditionViolated { check, witness: Witness::TetrisViolation { .. } } => {
            assert_eq!(check, "tetris-free")
        }
        other => panic!("{other:?}"),
    }
    assert!(report.h_unambiguous.is_none());
}

#[test]
fn identity_image_is_evidence_regular() {
    let report = decide_hom_regularity(&automaton("f_powers.wta"), &hom("f_identity.hom"), &opts(0, 4)).unwrap();
    assert_eq!(report.verdict, RegularityVerdict::EvidenceRegular { lin_height: 0, bound: 4 });
    assert!(report.warnings.is_empty());
}

#[test]
fn reports_are_deterministic() {
    let a = automaton("f_powers.wta");
    let h = hom("f_duplicate.hom");
    let first = decide_hom_regularity(&a, &h, &opts(2, 5)).unwrap();
    let second = decide_hom_regularity(&a, &h, &opts(2, 5)).unwrap();
    assert_eq!(first, second);
    for format in [Format::Text, Format::Machine] {
        assert_eq!(emit_report(&first, format), emit_report(&second, format));
    }
}

#[test]
fn report_formats_carry_the_verdict_and_witness() {
    let report = decide_hom_regularity(&automaton("f_powers.wta"), &hom("f_duplicate.hom"), &opts(2, 5)).unwrap();
    let machine: serde_json::Value = serde_json::from_str(&emit_report(&report, Format::Machine)).unwrap();
    assert_eq!(machine["verdict"]["verdict"], "LINEARIZATION_MISMATCH");
    assert_eq!(machine["verdict"]["witness"], "k(g(g(g(a))),g(g(g(g(a)))))");
    assert_eq!(machine["options"]["lin_height"], 2);
    let text = emit_report(&report, Format::Text);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("verdict: LINEARIZATION_MISMATCH"), "{last}");
    assert!(last.contains("k(g(g(g(a))),g(g(g(g(a)))))"), "{last}");
}

#[test]
fn non_zero_sum_free_semirings_never_claim_regularity() {
    let text = read("f_powers.wta").replace("semiring: natural", "semiring: integer");
    let a = wtah::parse_automaton(&text).unwrap();
    let report = decide_hom_regularity(&a, &hom("f_identity.hom"), &opts(0, 4)).unwrap();
    assert!(!report.zero_sum_free);
    assert_eq!(report.warnings.len(), 1);
    assert_eq!(report.verdict.name(), "UNKNOWN");
    assert_eq!(report.support_basis, Some(SupportBasis::UnambiguousUpTo(4)));
}

#[test]
fn inputs_are_validated() {
    let a = automaton("letter_count.wta");
    assert!(decide_hom_regularity(&a, &hom("f_duplicate.hom"), &opts(2, 5)).is_err());
    let grammar = automaton("pair_lin2.wta");
    assert!(decide_hom_regularity(&grammar, &hom("f_duplicate.hom"), &opts(2, 5)).is_err());
}

#[test]
fn support_reduction() {
    let r = reduce_to_support(&automaton("pair_eq_restricted.wta"), 4).unwrap();
    assert_eq!(r.basis, SupportBasis::ZeroSumFree);
    assert!(r.supports_agree());
    assert_eq!(r.projection.semiring(), Semiring::Boolean);

    let z6 = wtah::construct::eliminate_zero_divisors(&automaton("z6_zero_run.wta")).unwrap();
    let r = reduce_to_support(&z6, 4).unwrap();
    assert_eq!(r.basis, SupportBasis::UnambiguousUpTo(4));
    assert!(r.supports_agree());
}

#[cfg(unix)]
#[test]
fn oracle_answers_are_used_and_malformed_answers_give_unknown() {
    use std::io::Write;
    let dir = tempfile::tempdir().unwrap();
    let script = |name: &str, body: &str| {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "#!/bin/sh\n{body}").unwrap();
        path.to_string_lossy().into_owned()
    };
    let a = automaton("f_powers.wta");
    let h = hom("f_duplicate.hom");
    let run = |cmd: String| {
        let o = DecisionOptions { oracle: Some(cmd), ..DecisionOptions::default() };
        decide_hom_regularity(&a, &h, &o).unwrap().verdict
    };
    let checks = script("checks.sh", "grep -q 'semiring: boolean' \"$1\" && echo nonregular");
    assert_eq!(run(format!("sh {checks}")), RegularityVerdict::OracleNonregular);
    let yes = script("yes.sh", "echo regular");
    assert_eq!(run(format!("sh {yes}")), RegularityVerdict::OracleRegular);
    let junk = script("junk.sh", "echo maybe");
    assert_eq!(run(format!("sh {junk}")).name(), "UNKNOWN");
    let fails = script("fails.sh", "echo regular; exit 3");
    assert_eq!(run(format!("sh {fails}")).name(), "UNKNOWN");
    assert_eq!(run("/nonexistent/oracle".into()).name(), "UNKNOWN");
}
