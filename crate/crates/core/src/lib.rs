//! Verification of exchange properties of set functions.
//!
//! The crate decides M♮-concavity (single exchange, multiple exchange and
//! local inequalities), the valuated-matroid exchange property and the
//! exchange axioms for set families, evaluates the Fenchel-type duality
//! between the two slices of a function, and tests the gross-substitutes
//! family of conditions at sampled prices.
//!
//! All arithmetic is exact. Values are rationals extended by −∞, stored as
//! integers over a common denominator.

pub mod duality;
pub mod econ;
pub mod error;
pub mod exchange;
pub mod generators;
pub mod setfn;
pub mod subset;
pub mod value;
pub mod verdict;

#[cfg(test)]
mod testing;

pub use error::{CoreError, Result};
pub use setfn::{parse_instance, Instance, PriceVector, SetFamily, SetFunction, SlicePair};
pub use subset::{parse_subset, Subset, MAX_N};
pub use value::{format_rational, parse_rational, ExtValue, Rational};
pub use verdict::{FamilyAxiom, LocalFamily, SplitPart, Verdict, Violation, Witness};
