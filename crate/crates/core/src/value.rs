//! Exact extended-real values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;

/// Exact rational number used for every value and price.
pub type Rational = Ratio<i128>;

/// Largest magnitude accepted for a scaled numerator. Leaves headroom so that
/// sums of up to 2^20 table entries and prices cannot overflow `i128`.
pub(crate) const MAX_SCALED: i128 = 1 << 96;

/// Sentinel for −∞ inside scaled integer tables.
pub(crate) const NEG_INF: i128 = i128::MIN;

/// `a + b` under the convention (−∞) + a = −∞.
#[inline]
pub(crate) fn ext_add(a: i128, b: i128) -> i128 {
    if a == NEG_INF || b == NEG_INF {
        NEG_INF
    } else {
        a + b
    }
}

/// A finite rational or −∞.
///
/// The derived ordering puts `NegInfinity` below every finite value, which is
/// the order used by all exchange inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtValue {
    NegInfinity,
    Finite(Rational),
}

impl ExtValue {
    pub fn int(v: i128) -> Self {
        ExtValue::Finite(Rational::from_integer(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational> {
        match *self {
            ExtValue::Finite(r) => Some(r),
            ExtValue::NegInfinity => None,
        }
    }

    /// Maximum of an iterator; −∞ for an empty one.
    pub fn max_of<I: IntoIterator<Item = ExtValue>>(it: I) -> ExtValue {
        it.into_iter().max().unwrap_or(ExtValue::NegInfinity)
    }

    pub(crate) fn from_scaled(num: i128, den: i128) -> ExtValue {
        if num == NEG_INF {
            ExtValue::NegInfinity
        } else {
            ExtValue::Finite(Rational::new(num, den))
        }
    }
}

impl Default for ExtValue {
    fn default() -> Self {
        ExtValue::NegInfinity
    }
}

impl From<Rational> for ExtValue {
    fn from(r: Rational) -> Self {
        ExtValue::Finite(r)
    }
}

impl From<i64> for ExtValue {
    fn from(v: i64) -> Self {
        ExtValue::int(v as i128)
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::NegInfinity,
        }
    }
}

impl PartialEq<Rational> for ExtValue {
    fn eq(&self, other: &Rational) -> bool {
        *self == ExtValue::Finite(*other)
    }
}

impl PartialOrd<Rational> for ExtValue {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(&ExtValue::Finite(*other)))
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::NegInfinity => f.write_str("-inf"),
            ExtValue::Finite(r) => write!(f, "{}", format_rational(r)),
        }
    }
}

/// `"p/q"`, or just `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Decimal notation is rejected so nothing is rounded.
pub fn parse_rational(s: &str) -> Result<Rational, CoreError> {
    let s = s.trim();
    let bad = || CoreError::Parse(format!("invalid rational {s:?} (expected an integer or \"p/q\")"));
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i128 = num.parse().map_err(|_| bad())?;
    let den: i128 = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(CoreError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

impl FromStr for ExtValue {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" | "-infinity" | "−∞" => Ok(ExtValue::NegInfinity),
            other => parse_rational(other).map(ExtValue::Finite),
        }
    }
}

impl Serialize for ExtValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtValue::Finite(r) if r.is_integer() && r.numer().abs() < (1i128 << 53) => {
                s.serialize_i64(*r.numer() as i64)
            }
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ExtValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        match raw {
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(v) => Ok(ExtValue::int(v as i128)),
                None => Err(serde::de::Error::custom(format!(
                    "non-integer number {n}; write rationals as \"p/q\" strings"
                ))),
            },
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("expected a value, found {other}"))),
        }
    }
}

/// Serde adapter writing a rational as an integer or a `"p/q"` string.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        ExtValue::Finite(*r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match ExtValue::deserialize(d)? {
            ExtValue::Finite(r) => Ok(r),
            ExtValue::NegInfinity => Err(serde::de::Error::custom("expected a finite rational")),
        }
    }
}

/// Serde adapter for a list of rationals.
pub mod rational_vec_serde {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&ExtValue::Finite(*r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw: Vec<ExtValue> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|v| v.finite().ok_or_else(|| serde::de::Error::custom("expected finite rationals")))
            .collect()
    }
}

/// Least common multiple of a set of positive denominators, with overflow checks.
pub(crate) fn common_denominator<'a, I>(dens: I) -> Result<i128, CoreError>
where
    I: IntoIterator<Item = &'a i128>,
{
    let mut acc: i128 = 1;
    for &d in dens {
        let g = acc.gcd(&d);
        acc = (acc / g).checked_mul(d).ok_or(CoreError::Overflow)?;
        if acc > MAX_SCALED {
            return Err(CoreError::Overflow);
        }
    }
    Ok(acc)
}

/// Numerator of `r` over the denominator `den`, which must be a multiple of `r.denom()`.
pub(crate) fn scale_to(r: &Rational, den: i128) -> Result<i128, CoreError> {
    let factor = den / r.denom();
    let v = r.numer().checked_mul(factor).ok_or(CoreError::Overflow)?;
    if v.abs() > MAX_SCALED {
        return Err(CoreError::Overflow);
    }
    Ok(v)
}
