//! Weighted tree automata with hom-constraints (WTAh) over commutative
//! semirings: homomorphic images of weighted tree series, removal of
//! zero-weight runs, boolean projection, linearization, bounded analyses and
//! a regularity pipeline for homomorphic images.

pub mod analyze;
pub mod automaton;
pub mod construct;
pub mod decide;
pub mod format;
pub mod hom;
pub mod report;
pub mod semiring;
pub mod term;

pub use analyze::{bounded_equivalence, check_h_unambiguous, run_count_compare, Verdict, Witness};
pub use automaton::{Automaton, Kind, Rule, Run};
pub use decide::{decide_hom_regularity, DecisionOptions, DecisionReport, RegularityVerdict};
pub use format::{emit_automaton, emit_hom, parse_automaton, parse_hom};
pub use hom::{check_tetris_free, TreeHomomorphism};
pub use semiring::{Semiring, Weight};
pub use term::{Position, RankedAlphabet, Tree};
