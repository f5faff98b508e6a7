//! Counting quasimorphisms with certified defect bounds, and the stable
//! commutator length lower bounds they induce through the elementary
//! direction of Bavard duality.
//!
//! The library works over two families of groups where every certificate can
//! be checked by exact combinatorics:
//!
//! * free groups of finite rank ([`freewords`], [`brooks`], [`scl`]), where
//!   quasimorphisms count disjoint copies of a pattern word along geodesics
//!   in the Cayley tree, and
//! * amalgamated free products of finite groups over a proper common
//!   subgroup ([`amalgam`]), where the same counting runs over reduced
//!   syllable words and Britton normal forms.
//!
//! All certificate arithmetic is exact: values, defects and bounds are
//! integers or [`Rational`]s, never floats.

pub mod amalgam;
pub mod brooks;
pub mod freewords;
pub mod scl;

/// Exact rational scalar used throughout certificates.
pub type Rational = num_rational::Rational64;

pub use amalgam::{AmalgamSpec, AmalgamWord, FiniteGroupTable, NormalForm};
pub use brooks::{BrooksPattern, QmDescriptor};
pub use freewords::{Alphabet, CyclicWord, FreeWord};
pub use scl::{CommutatorExpression, SclReport};

/// Coarse classification of library errors, used by callers (notably the
/// command-line front end) to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    /// Malformed or out-of-range input: the caller can fix the request.
    InvalidInput,
    /// The input is well-formed but violates a mathematical hypothesis the
    /// construction needs (mirror element, commensurable exclusion, failed
    /// double-coset condition, ...).
    HypothesisViolation,
    /// A certified internal invariant failed; this is a bug, not user error.
    InternalAssertion,
}

/// Errors that know which [`FailureClass`] they belong to.
pub trait ClassifiedError {
    fn class(&self) -> FailureClass;
}
