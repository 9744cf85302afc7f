//! The regularity pipeline for homomorphic images of weighted tree series.
//!
//! For a WTA `A` and a tetris-free homomorphism `h` such that `A` is
//! h-unambiguous, the image automaton is unambiguous and its series is
//! regular iff its support is. The support is recognized by the boolean
//! projection, whose regularity is either delegated to an external oracle
//! or probed with a bounded linearization surrogate.

use std::io::Write as _;
use std::process::Command;

use serde::Serialize;
use thiserror::Error;

use crate::analyze::{bounded_equivalence, check_h_unambiguous, AnalyzeError, Verdict, Witness};
use crate::automaton::{check_unambiguous, support_up_to, Automaton, Kind};
use crate::construct::{
    eliminate_zero_divisors_with_path, hom_image, linearize, project_boolean, wtg_to_wta, ConstructError,
    ZeroDivisorPath,
};
use crate::format::emit_automaton;
use crate::hom::{check_tetris_free, TreeHomomorphism};
use crate::semiring::Weight;
use crate::term::Tree;

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("expected a WTA, got a {0}")]
    NotWta(String),
    #[error("automaton alphabet `{automaton}` differs from homomorphism source `{hom}`")]
    AlphabetMismatch { automaton: String, hom: String },
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

/// Bounds and oracle for one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOptions {
    /// Height bound for tetris-freeness, h-unambiguity and image
    /// unambiguity.
    pub check_bound: usize,
    /// Height of the trees used to linearize constraints.
    pub lin_height: usize,
    /// Height bound for comparing the image with its linearization.
    pub eq_bound: usize,
    /// Command answering `regular`/`nonregular` for a boolean automaton
    /// file, which is passed as the last argument.
    pub oracle: Option<String>,
}

impl Default for DecisionOptions {
    fn default() -> Self {
        DecisionOptions { check_bound: 4, lin_height: 2, eq_bound: 5, oracle: None }
    }
}

/// Final verdict of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegularityVerdict {
    /// The image agrees with its linearization up to `bound`. Evidence for
    /// regularity, not a proof.
    EvidenceRegular { lin_height: usize, bound: usize },
    /// The image and its linearization differ on `witness`. Shows that
    /// `lin_height` is too small, not that the image is non-regular.
    LinearizationMismatch { lin_height: usize, bound: usize, witness: Tree, image_value: Weight, lin_value: Weight },
    OracleRegular,
    OracleNonregular,
    /// A bounded precondition check found a counterexample.
    PreconditionViolated { check: String, witness: Witness },
    Unknown { reason: String },
}

impl RegularityVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            RegularityVerdict::EvidenceRegular { .. } => "EVIDENCE_REGULAR",
            RegularityVerdict::LinearizationMismatch { .. } => "LINEARIZATION_MISMATCH",
            RegularityVerdict::OracleRegular => "ORACLE_REGULAR",
            RegularityVerdict::OracleNonregular => "ORACLE_NONREGULAR",
            RegularityVerdict::PreconditionViolated { .. } => "PRECONDITION_VIOLATED",
            RegularityVerdict::Unknown { .. } => "UNKNOWN",
        }
    }

    /// A statement about regularity itself, which needs a zero-sum free
    /// semiring.
    fn is_regularity_claim(&self) -> bool {
        matches!(
            self,
            RegularityVerdict::EvidenceRegular { .. }
                | RegularityVerdict::OracleRegular
                | RegularityVerdict::OracleNonregular
        )
    }
}

/// Size and shape of a constructed automaton.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutomatonSummary {
    pub kind: String,
    pub semiring: String,
    pub states: usize,
    pub rules: usize,
    pub eq_restricted: bool,
}

impl AutomatonSummary {
    pub fn of(a: &Automaton) -> AutomatonSummary {
        AutomatonSummary {
            kind: a.kind().to_string(),
            semiring: a.semiring().id(),
            states: a.states().len(),
            rules: a.rules().len(),
            eq_restricted: a.is_eq_restricted().holds(),
        }
    }
}

/// Why the boolean projection recognizes the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "basis", content = "bound", rename_all = "snake_case")]
pub enum SupportBasis {
    ZeroSumFree,
    UnambiguousUpTo(usize),
    /// Neither condition could be established.
    Unestablished,
}

impl std::fmt::Display for SupportBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupportBasis::ZeroSumFree => f.write_str("zero-sum free semiring"),
            SupportBasis::UnambiguousUpTo(b) => write!(f, "unambiguous up to height {b}"),
            SupportBasis::Unestablished => f.write_str("not established"),
        }
    }
}

/// Everything the pipeline found, in the order it ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecisionReport {
    pub semiring: String,
    pub zero_sum_free: bool,
    pub options: ReportOptions,
    pub nondeleting: bool,
    pub nonerasing: bool,
    pub tetris_free: Option<Verdict>,
    pub h_unambiguous: Option<Verdict>,
    pub image: Option<AutomatonSummary>,
    pub zero_divisors: Option<ZeroDivisorPath>,
    pub image_unambiguous: Option<Verdict>,
    pub projection: Option<AutomatonSummary>,
    pub support_basis: Option<SupportBasis>,
    pub warnings: Vec<String>,
    pub verdict: RegularityVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportOptions {
    pub check_bound: usize,
    pub lin_height: usize,
    pub eq_bound: usize,
    pub oracle: Option<String>,
}

/// Runs the pipeline on a WTA `a` and homomorphism `h`.
pub fn decide_hom_regularity(
    a: &Automaton,
    h: &TreeHomomorphism,
    opts: &DecisionOptions,
) -> Result<DecisionReport, DecideError> {
    if a.kind() != Kind::Wta {
        return Err(DecideError::NotWta(a.kind().to_string()));
    }
    if a.alphabet() != h.source() {
        return Err(DecideError::AlphabetMismatch {
            automaton: a.alphabet().to_string(),
            hom: h.source().to_string(),
        });
    }
    let zero_sum_free = a.semiring().is_zero_sum_free();
    let mut report = DecisionReport {
        semiring: a.semiring().id(),
        zero_sum_free,
        options: ReportOptions {
            check_bound: opts.check_bound,
            lin_height: opts.lin_height,
            eq_bound: opts.eq_bound,
            oracle: opts.oracle.clone(),
        },
        // Guaranteed by the homomorphism type.
        nondeleting: true,
        nonerasing: true,
        tetris_free: None,
        h_unambiguous: None,
        image: None,
        zero_divisors: None,
        image_unambiguous: None,
        projection: None,
        support_basis: None,
        warnings: Vec::new(),
        verdict: RegularityVerdict::Unknown { reason: "pipeline did not finish".into() },
    };
    if !zero_sum_free {
        report.warnings.push(format!(
            "semiring {} is not zero-sum free; regularity of the support and of the series may differ, \
             so regularity verdicts are reported as UNKNOWN",
            a.semiring()
        ));
    }

    let tetris = check_tetris_free(h, opts.check_bound);
    report.tetris_free = Some(tetris.clone());
    if let Some(w) = tetris.into_witness() {
        report.verdict = RegularityVerdict::PreconditionViolated { check: "tetris-free".into(), witness: w };
        return Ok(report);
    }

    let h_unamb = check_h_unambiguous(a, h, opts.check_bound)?;
    report.h_unambiguous = Some(h_unamb.clone());
    if let Some(w) = h_unamb.into_witness() {
        report.verdict = RegularityVerdict::PreconditionViolated { check: "h-unambiguous".into(), witness: w };
        return Ok(report);
    }

    let raw_image = hom_image(a, h)?;
    let (image, path) = match eliminate_zero_divisors_with_path(&raw_image) {
        Ok(x) => x,
        Err(e) => {
            report.image = Some(AutomatonSummary::of(&raw_image));
            report.verdict = RegularityVerdict::Unknown { reason: format!("zero-divisor elimination failed: {e}") };
            return Ok(report);
        }
    };
    report.image = Some(AutomatonSummary::of(&image));
    report.zero_divisors = Some(path);

    let unamb = check_unambiguous(&image, opts.check_bound);
    report.image_unambiguous = Some(unamb.clone());
    if let Some(w) = unamb.witness_ref() {
        report.verdict = RegularityVerdict::Unknown {
            reason: format!(
                "internal consistency failure: the image automaton should be unambiguous after the \
                 precondition checks passed, but {w}"
            ),
        };
        return Ok(report);
    }

    let projection = project_boolean(&image)?;
    report.projection = Some(AutomatonSummary::of(&projection));
    report.support_basis =
        Some(if zero_sum_free { SupportBasis::ZeroSumFree } else { SupportBasis::UnambiguousUpTo(opts.check_bound) });

    let verdict = match &opts.oracle {
        Some(cmd) => ask_oracle(cmd, &projection),
        None => surrogate(&image, opts)?,
    };
    report.verdict = if !zero_sum_free && verdict.is_regularity_claim() {
        RegularityVerdict::Unknown {
            reason: format!("{} capped: semiring {} is not zero-sum free", verdict.name(), a.semiring()),
        }
    } else {
        verdict
    };
    Ok(report)
}

fn surrogate(image: &Automaton, opts: &DecisionOptions) -> Result<RegularityVerdict, DecideError> {
    let lin = wtg_to_wta(&linearize(image, opts.lin_height)?)?;
    let verdict = bounded_equivalence(image, &lin, opts.eq_bound)?;
    Ok(match verdict.into_witness() {
        None => RegularityVerdict::EvidenceRegular { lin_height: opts.lin_height, bound: opts.eq_bound },
        Some(Witness::ValueMismatch { tree, left, right }) => RegularityVerdict::LinearizationMismatch {
            lin_height: opts.lin_height,
            bound: opts.eq_bound,
            witness: tree,
            image_value: left,
            lin_value: right,
        },
        Some(other) => RegularityVerdict::Unknown { reason: format!("unexpected equivalence witness: {other}") },
    })
}

/// Runs `cmd` (split on whitespace) with the emitted boolean automaton file
/// appended as last argument.
fn ask_oracle(cmd: &str, projection: &Automaton) -> RegularityVerdict {
    let unknown = |reason: String| RegularityVerdict::Unknown { reason };
    let mut parts = cmd.split_whitespace();
    let Some(program) = parts.next() else { return unknown("empty oracle command".into()) };
    let mut file = match tempfile::Builder::new().prefix("support-").suffix(".wta").tempfile() {
        Ok(f) => f,
        Err(e) => return unknown(format!("cannot create oracle input file: {e}")),
    };
    if let Err(e) = file.write_all(emit_automaton(projection).as_bytes()).and_then(|_| file.flush()) {
        return unknown(format!("cannot write oracle input file: {e}"));
    }
    let output = match Command::new(program).args(parts).arg(file.path()).output() {
        Ok(o) => o,
        Err(e) => return unknown(format!("cannot run oracle `{cmd}`: {e}")),
    };
    let answer = String::from_utf8_lossy(&output.stdout);
    match (output.status.success(), answer.trim()) {
        (true, "regular") => RegularityVerdict::OracleRegular,
        (true, "nonregular") => RegularityVerdict::OracleNonregular,
        (ok, text) => unknown(format!(
            "oracle answered {:?} with {}",
            text,
            if ok { "success".to_string() } else { output.status.to_string() }
        )),
    }
}

/// The support reduction for an eq-restricted automaton without zero-weight
/// runs: its boolean projection, the condition under which the projection
/// recognizes the support, and the supports of both sides up to `bound`.
#[derive(Debug, Clone)]
pub struct SupportReduction {
    pub projection: Automaton,
    pub basis: SupportBasis,
    pub weighted_support: Vec<Tree>,
    pub boolean_support: Vec<Tree>,
}

impl SupportReduction {
    pub fn supports_agree(&self) -> bool {
        self.weighted_support == self.boolean_support
    }
}

pub fn reduce_to_support(a: &Automaton, bound: usize) -> Result<SupportReduction, ConstructError> {
    let projection = project_boolean(a)?;
    let basis = if a.semiring().is_zero_sum_free() {
        SupportBasis::ZeroSumFree
    } else if check_unambiguous(a, bound).is_ok() {
        SupportBasis::UnambiguousUpTo(bound)
    } else {
        SupportBasis::Unestablished
    };
    let weighted_support = support_up_to(a, bound).into_iter().map(|(t, _)| t).collect();
    let boolean_support = support_up_to(&projection, bound).into_iter().map(|(t, _)| t).collect();
    Ok(SupportReduction { projection, basis, weighted_support, boolean_support })
}
