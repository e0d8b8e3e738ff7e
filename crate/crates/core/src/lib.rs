//! Morphic words, repetitions, pattern avoidance and exhaustive search of
//! factorial languages.

pub mod characterize;
pub mod cli;
pub mod constraint;
pub mod error;
pub mod graph;
pub mod pattern;
pub mod repetition;
pub mod search;
pub mod word;

pub use characterize::{
    code_factor_membership, every_window_contains, verify_all, verify_characterization, Report,
    TheoremManifest,
};
pub use constraint::{check, ConstraintSet, Extender, Violation, ViolationKind};
pub use error::{Error, Result};
pub use graph::{builtin_graph, is_walk, LabelledGraph};
pub use pattern::{avoids, find_occurrences, parse_formula, Assignment, Formula};
pub use repetition::{
    distinct_min_overlaps, distinct_squares, find_sq_t, is_exponent_free, max_exponent, Rational,
    Repetition,
};
pub use search::{
    count_by_length, extendable_set, longest_word_search, ExtendableSet, OutcomeKind, SearchLimits,
    SearchOutcome,
};
pub use word::{
    apply, compose, factors, fixed_point_prefix, morphic_prefix, morphisms_equal, parse_morphism,
    Letter, Morphism, Word,
};
