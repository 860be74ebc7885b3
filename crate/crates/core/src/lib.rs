//! Deciding and certifying zero topological entropy for periodic patterns
//! on trees.
//!
//! A pattern is a period `n` together with a family of discrete components
//! (subsets of `{0..n-1}`) whose incidence graph is a tree; the dynamics is
//! the shift `i -> i+1 mod n`. The crate computes the pattern's entropy from
//! the spectral radius of its path transition matrix, decides zero entropy
//! purely combinatorially through iterated collapses (with replayable
//! certificates), builds patterns by 2-explosions, and constructs the
//! zero-entropy star patterns for every admissible period/valence pair.

pub mod collapse;
pub mod entropy;
pub mod enumerate;
pub mod error;
pub mod explode;
pub mod pattern;
pub mod star;

pub use collapse::{
    combinatorial_collapse, is_strongly_collapsible, maximal_trivial_structure,
    trivial_block_divisors, BlockStructure, CollapseCertificate,
};
pub use entropy::{
    basic_paths, entropy, is_zero_entropy_spectral, opening, path_matrix, spectral_radius,
    BasicPath, PathMatrix, DEFAULT_TOL,
};
pub use enumerate::{
    count_labeled, cross_validate, cross_validate_star, enumerate_patterns,
    enumerate_star_patterns, random_pattern, verify_theorem_c, EnumerationReport, TheoremCEntry,
    TheoremCReport,
};
pub use error::{Error, Result};
pub use explode::{base_pattern, double, explode_sequence, LiftPolicy};
pub use pattern::{IncidenceTree, Pattern, StarClass};
pub use star::{
    bitrev_pattern, central_split, ee2_chain, star_map_witness, star_zero_case, star_zero_pattern,
    zero_possible, zero_possible_relaxed, StarZeroCase,
};
