//! Subsets of a ground set `{1, ..., n}` encoded as characteristic bitsets.
//!
//! Element `e` (1-based, as printed and serialized) is bit `e - 1`. The
//! numeric value of the bitset is the canonical ordering used whenever a
//! "smallest" subset is requested.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};

/// Hard cap on the ground-set size.
pub const MAX_N: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The full set `{1..n}`.
    #[inline]
    pub fn full(n: usize) -> Subset {
        Subset(((1u64 << n) - 1) as u32)
    }

    /// Singleton from a 0-based element index.
    #[inline]
    pub fn singleton(e: usize) -> Subset {
        Subset(1 << e)
    }

    /// Builds a subset from 1-based element labels, validating them against `n`.
    pub fn from_elements(elems: &[usize], n: usize) -> Result<Subset> {
        let mut bits = 0u32;
        for &e in elems {
            if e == 0 || e > n {
                return Err(CoreError::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset(bits))
    }

    /// Sorted 1-based element labels.
    pub fn elements(self) -> Vec<usize> {
        self.iter().map(|e| e + 1).collect()
    }

    /// Iterates 0-based element indices in increasing order.
    #[inline]
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    #[inline]
    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn with(self, e: usize) -> Subset {
        Subset(self.0 | 1 << e)
    }

    #[inline]
    pub fn without(self, e: usize) -> Subset {
        Subset(self.0 & !(1 << e))
    }

    #[inline]
    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    #[inline]
    pub fn intersection(self, o: Subset) -> Subset {
        Subset(self.0 & o.0)
    }

    #[inline]
    pub fn difference(self, o: Subset) -> Subset {
        Subset(self.0 & !o.0)
    }

    #[inline]
    pub fn is_subset_of(self, o: Subset) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// True when every element lies in `{1..n}`.
    #[inline]
    pub fn fits(self, n: usize) -> bool {
        n >= 32 || self.0 >> n == 0
    }

    pub(crate) fn check(self, n: usize) -> Result<Subset> {
        if self.fits(n) {
            Ok(self)
        } else {
            Err(CoreError::SubsetOutOfRange { subset: self.0, n })
        }
    }

    /// All subsets of `self`, in increasing bitset order.
    pub fn subsets(self) -> Submasks {
        Submasks { mask: self.0, next: Some(0) }
    }

    /// All subsets of `self`, ordered by cardinality and then by bitset value.
    pub fn subsets_by_size(self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self.subsets().collect();
        v.sort_by_key(|s| (s.len(), s.0));
        v
    }

    /// Spreads the low bits of `local` onto the elements of `self`: bit `k` of
    /// `local` selects the `k`-th smallest element of `self`.
    pub fn deposit(self, local: u32) -> Subset {
        let mut out = 0u32;
        for (k, e) in self.iter().enumerate() {
            if local >> k & 1 == 1 {
                out |= 1 << e;
            }
        }
        Subset(out)
    }
}

pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

/// Submask enumeration in increasing numeric order.
pub struct Submasks {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;

    #[inline]
    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // increment restricted to the bits of `mask`
            Some((cur | !self.mask).wrapping_add(1) & self.mask)
        };
        Some(Subset(cur))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", e + 1)?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let elems: Vec<usize> = Vec::deserialize(d)?;
        Subset::from_elements(&elems, MAX_N).map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of 1-based elements; the empty string and
/// `{}` both denote the empty set.
pub fn parse_subset(s: &str, n: usize) -> Result<Subset> {
    let t = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
    if t.is_empty() {
        return Ok(Subset::EMPTY);
    }
    let elems = t
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CoreError::Parse(format!("invalid element {p:?} in subset {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Subset::from_elements(&elems, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_are_increasing_and_complete() {
        let m = Subset(0b1011);
        let all: Vec<u32> = m.subsets().map(|s| s.0).collect();
        assert_eq!(all, vec![0, 1, 2, 3, 8, 9, 10, 11]);
        assert_eq!(Subset::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn by_size_order() {
        let v: Vec<u32> = Subset(0b111).subsets_by_size().iter().map(|s| s.0).collect();
        assert_eq!(v, vec![0, 1, 2, 4, 3, 5, 6, 7]);
    }

    #[test]
    fn display_and_parse() {
        let s = parse_subset("3,1", 3).unwrap();
        assert_eq!(s, Subset(0b101));
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(parse_subset("{}", 3).unwrap(), Subset::EMPTY);
        assert!(parse_subset("4", 3).is_err());
        assert!(parse_subset("0", 3).is_err());
    }

    #[test]
    fn deposit_maps_local_bits() {
        let host = Subset(0b10110);
        assert_eq!(host.deposit(0b101), Subset(0b10010));
        assert_eq!(host.deposit(0), Subset::EMPTY);
    }
}
