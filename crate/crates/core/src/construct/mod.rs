//! Constructions on weighted tree automata: homomorphic images, removal of
//! zero-weight runs, boolean projection, linearization and WTG flattening.

mod image;
mod linearize;
mod normalize;
mod project;
mod zero_divisor;

use thiserror::Error;

use crate::semiring::{Semiring, SemiringError};
use crate::term::RankedAlphabet;

pub use image::{hom_image, hom_image_annotated, relabel_symbols, run_image, AnnotatedImage};
pub use linearize::linearize;
pub use normalize::wtg_to_wta;
pub use project::project_boolean;
pub use zero_divisor::{eliminate_zero_divisors, eliminate_zero_divisors_with_path, ZeroDivisorPath};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("expected a WTA, got a {0}")]
    NotWta(String),
    #[error("expected a WTG, got a {0}")]
    NotWtg(String),
    #[error("automaton alphabet `{automaton}` differs from homomorphism source `{hom}`")]
    AlphabetMismatch { automaton: RankedAlphabet, hom: RankedAlphabet },
    #[error("automaton has a sink but is not eq-restricted: {0}")]
    NotEqRestricted(String),
    #[error("{0} is infinite and has zero divisors")]
    InfiniteWithZeroDivisors(Semiring),
    #[error("run does not belong to the source automaton")]
    ForeignRun,
    #[error(transparent)]
    Semiring(#[from] SemiringError),
}

/// Constructions on automata with a sink need the eq-restricted shape;
/// sink-free automata are accepted as they are.
pub(crate) fn require_eq_restricted_or_sink_free(a: &crate::automaton::Automaton) -> Result<(), ConstructError> {
    if a.sink().is_none() {
        return Ok(());
    }
    match a.is_eq_restricted() {
        crate::automaton::EqRestriction::Yes => Ok(()),
        crate::automaton::EqRestriction::No(reason) => Err(ConstructError::NotEqRestricted(reason)),
    }
}
