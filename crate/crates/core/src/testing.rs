pub use crate::generators::{comp, rank2, wmat};
use crate::subset::Subset;

/// Subset from 1-based elements.
pub fn s(elems: &[usize]) -> Subset {
    elems.iter().fold(Subset::EMPTY, |acc, &e| acc.with(e - 1))
}
