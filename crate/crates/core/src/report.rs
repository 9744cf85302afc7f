//! Text and JSON rendering of verdicts and pipeline reports.
//!
//! The JSON form of a [`Verdict`] is `{"status": "ok"|"witness", "bound": n,
//! "witness": {...}|null}`; a witness carries a `kind` tag and its trees as
//! term text. A [`DecisionReport`] serializes field by field, with the final
//! verdict under `verdict` tagged by its upper-case name.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::analyze::{Verdict, Witness};
use crate::automaton::EqRestriction;
use crate::decide::{DecisionReport, RegularityVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "machine" | "json" => Ok(Format::Machine),
            other => Err(format!("unknown format `{other}` (expected text or machine)")),
        }
    }
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    status: &'static str,
    bound: usize,
    witness: Option<&'a Witness>,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Renders a bounded-analysis verdict.
pub fn emit_verdict(v: &Verdict, format: Format) -> String {
    match format {
        Format::Machine => json(&VerdictJson { status: v.status(), bound: v.bound(), witness: v.witness_ref() }),
        Format::Text => format!("{v}\n"),
    }
}

#[derive(Serialize)]
struct EqRestrictionJson<'a> {
    status: &'static str,
    reason: Option<&'a str>,
}

/// Renders the eq-restriction test; it is exact, so there is no bound.
pub fn emit_eq_restriction(e: &EqRestriction, format: Format) -> String {
    let (status, reason) = match e {
        EqRestriction::Yes => ("ok", None),
        EqRestriction::No(r) => ("witness", Some(r.as_str())),
    };
    match format {
        Format::Machine => json(&EqRestrictionJson { status, reason }),
        Format::Text => match reason {
            None => "ok: eq-restricted\n".to_string(),
            Some(r) => format!("not eq-restricted: {r}\n"),
        },
    }
}

/// Renders a pipeline report.
pub fn emit_report(r: &DecisionReport, format: Format) -> String {
    if format == Format::Machine {
        return json(r);
    }
    let mut out = String::new();
    let o = &r.options;
    let _ = writeln!(out, "semiring: {} (zero-sum free: {})", r.semiring, r.zero_sum_free);
    let _ = writeln!(
        out,
        "options: check bound {}, lin height {}, equivalence bound {}, oracle {}",
        o.check_bound,
        o.lin_height,
        o.eq_bound,
        o.oracle.as_deref().unwrap_or("none")
    );
    let _ = writeln!(out, "homomorphism: nondeleting {}, nonerasing {}", r.nondeleting, r.nonerasing);
    let step = |out: &mut String, name: &str, v: &Option<Verdict>| {
        if let Some(v) = v {
            let _ = writeln!(out, "{name}: {v}");
        }
    };
    step(&mut out, "tetris-free", &r.tetris_free);
    step(&mut out, "h-unambiguous", &r.h_unambiguous);
    if let Some(s) = &r.image {
        let _ = writeln!(
            out,
            "image automaton: {} over {}, {} states, {} rules, eq-restricted {}",
            s.kind, s.semiring, s.states, s.rules, s.eq_restricted
        );
    }
    if let Some(p) = &r.zero_divisors {
        let _ = writeln!(out, "zero divisors: {p}");
    }
    step(&mut out, "image unambiguous", &r.image_unambiguous);
    if let Some(s) = &r.projection {
        let _ = writeln!(out, "boolean projection: {} with {} states, {} rules", s.kind, s.states, s.rules);
    }
    if let Some(b) = &r.support_basis {
        let _ = writeln!(out, "projection recognizes the support because: {b}");
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = write!(out, "verdict: {}", r.verdict.name());
    match &r.verdict {
        RegularityVerdict::EvidenceRegular { lin_height, bound } => {
            let _ = write!(out, " (linearization at height {lin_height} agrees up to height {bound})");
        }
        RegularityVerdict::LinearizationMismatch { lin_height, bound, witness, image_value, lin_value } => {
            let _ = write!(
                out,
                " (lin height {lin_height}, bound {bound}): {witness} has weight {image_value} in the image \
                 and {lin_value} in the linearization"
            );
        }
        RegularityVerdict::PreconditionViolated { check, witness } => {
            let _ = write!(out, " ({check}): {witness}");
        }
        RegularityVerdict::Unknown { reason } => {
            let _ = write!(out, ": {reason}");
        }
        RegularityVerdict::OracleRegular | RegularityVerdict::OracleNonregular => {}
    }
    out.push('\n');
    out
}
